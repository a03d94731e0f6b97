"""Coupling Poisson tensors over a symplectic leaf S = {y = 0}.

Conventions (fixed so that the coupling tensor is Poisson, matches the affine
bracket to first order, and carries var X_H as a Hamiltonian field):

* ``omega = -psi^{-1}``;
* ``Gamma^a_{kb} = sum_j (psi^{-1})_{kj} D^{ja}_b``, so ``D_{dx^j} = nabla_{psi^{j.} d_.}``;
* ``sigma1^{ij}_a = sum_{kl} omega_{ik} K^{kl}_a omega_{lj}``;
* ``sigma = omega + sigma1_a y^a`` and ``c = -sigma^{-1}``;
* with ``N^a_j = Gamma^a_{jb} y^b`` the blocks of the tensor are
  ``P^{kl} = c^{kl}``, ``P^{ka} = c^{kj} N^a_j`` and
  ``P^{ab} = c^{ij} N^a_i N^b_j + lam^{ab}_c y^c``.
"""
from __future__ import annotations

from dataclasses import dataclass

from plin.errors import SingularError
from plin.expr import RatFunc
from plin.infinitesimal import AffFunc, InfTriple, aff_bracket, aff_of
from plin.linalg import det, inverse
from plin.linearize import LinVF
from plin.poisson import Bivector, Chart, VectorField, hamiltonian_vf, poisson_bracket


@dataclass(frozen=True)
class LeafGeom:
    chart: Chart
    omega: tuple
    gamma: tuple        # gamma[k][a][b] = Gamma^a_{kb}
    psi_inv: tuple


@dataclass(frozen=True)
class CouplingForm:
    chart: Chart
    sigma0: tuple
    sigma1: tuple       # sigma1[i][j][a]

    def matrix(self) -> tuple:
        """``sigma_{ij}(x, y) = sigma0_{ij} + sigma1^{ij}_a y^a``."""
        c = self.chart
        y = [c.var(n) for n in c.normal]
        out = []
        for i in range(c.m):
            row = []
            for j in range(c.m):
                acc = self.sigma0[i][j]
                for a in range(c.k):
                    if self.sigma1[i][j][a]:
                        acc = acc + self.sigma1[i][j][a] * y[a]
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)


@dataclass(frozen=True)
class CouplingTensor:
    bivector: Bivector

    @property
    def comp(self):
        return self.bivector.comp

    @property
    def chart(self) -> Chart:
        return self.bivector.chart


def leaf_geometry(T: InfTriple) -> LeafGeom:
    c = T.chart
    m, k = c.m, c.k
    if m and det(T.psi, c.table).is_zero():
        raise SingularError("psi is singular: S is not a symplectic leaf")
    pinv = inverse(T.psi, c.table) if m else ()
    omega = tuple(tuple(-f for f in r) for r in pinv)
    zero = c.zero()
    gamma = []
    for kk in range(m):
        block = []
        for a in range(k):
            row = []
            for b in range(k):
                acc = zero
                for j in range(m):
                    if pinv[kk][j] and T.dcon[j][a][b]:
                        acc = acc + pinv[kk][j] * T.dcon[j][a][b]
                row.append(acc)
            block.append(tuple(row))
        gamma.append(tuple(block))
    return LeafGeom(c, omega, tuple(gamma), pinv)


def rebuild_dcon(T: InfTriple, G: LeafGeom) -> tuple:
    """``D^{ja}_b = sum_k psi^{jk} Gamma^a_{kb}``; should reproduce ``T.dcon``."""
    c = T.chart
    out = []
    for j in range(c.m):
        block = []
        for a in range(c.k):
            row = []
            for b in range(c.k):
                acc = c.zero()
                for kk in range(c.m):
                    if T.psi[j][kk] and G.gamma[kk][a][b]:
                        acc = acc + T.psi[j][kk] * G.gamma[kk][a][b]
                row.append(acc)
            block.append(tuple(row))
        out.append(tuple(block))
    return tuple(out)


def coupling_form(T: InfTriple, G: LeafGeom) -> CouplingForm:
    c = T.chart
    m, k = c.m, c.k
    w = G.omega
    s1 = []
    for i in range(m):
        row = []
        for j in range(m):
            ent = []
            for a in range(k):
                acc = c.zero()
                for kk in range(m):
                    if not w[i][kk]:
                        continue
                    for ll in range(m):
                        if T.kform[kk][ll][a] and w[ll][j]:
                            acc = acc + w[i][kk] * T.kform[kk][ll][a] * w[ll][j]
                ent.append(acc)
            row.append(tuple(ent))
        s1.append(tuple(row))
    return CouplingForm(c, w, tuple(s1))


def coupling_tensor(G: LeafGeom, s: CouplingForm, lam) -> CouplingTensor:
    c = G.chart
    m, k = c.m, c.k
    sigma = s.matrix()
    if m:
        d = det(sigma, c.table)
        if c.on_s(d).is_zero():
            raise SingularError("the coupling form is degenerate along S")
        cinv = tuple(tuple(-f for f in r) for r in inverse(sigma, c.table))
    else:
        cinv = ()
    y = [c.var(n) for n in c.normal]
    zero = c.zero()
    N = [[sum((G.gamma[j][a][b] * y[b] for b in range(k) if G.gamma[j][a][b]), zero) for j in range(m)] for a in range(k)]
    entries = {}
    for kk in range(m):
        for ll in range(kk + 1, m):
            entries[(kk, ll)] = cinv[kk][ll]
        for a in range(k):
            acc = zero
            for j in range(m):
                if cinv[kk][j] and N[a][j]:
                    acc = acc + cinv[kk][j] * N[a][j]
            entries[(kk, m + a)] = acc
    for a in range(k):
        for b in range(a + 1, k):
            acc = zero
            for cc in range(k):
                if lam[a][b][cc]:
                    acc = acc + lam[a][b][cc] * y[cc]
            for i in range(m):
                if not N[a][i]:
                    continue
                for j in range(m):
                    if cinv[i][j] and N[b][j]:
                        acc = acc + cinv[i][j] * N[a][i] * N[b][j]
            entries[(m + a, m + b)] = acc
    return CouplingTensor(Bivector.from_upper(c, entries))


def coupling_from_triple(T: InfTriple) -> CouplingTensor:
    G = leaf_geometry(T)
    return coupling_tensor(G, coupling_form(T, G), T.lam)


def var_hamiltonian_residual(PL: CouplingTensor, p: AffFunc, L: LinVF) -> VectorField:
    """``X_{p}`` for the coupling tensor minus the linear field L."""
    return hamiltonian_vf(PL.bivector, p.as_function()) - L.to_vector_field()


def first_order_match_residual(PL: CouplingTensor, T: InfTriple, p: AffFunc, q: AffFunc) -> AffFunc:
    c = T.chart
    return aff_of(poisson_bracket(PL.bivector, p.as_function(), q.as_function()), c) - aff_bracket(T, p, q)


def theta_from_mu(G: LeafGeom, mu) -> tuple:
    """``theta_{ka} = sum_j (psi^{-1})_{kj} mu^j_a``."""
    return _contract(G.chart, G.psi_inv, mu)


def mu_from_theta(T: InfTriple, theta) -> tuple:
    """``mu^j_a = sum_k psi^{jk} theta_{ka}``."""
    return _contract(T.chart, T.psi, theta)


def _contract(c: Chart, mat, arr) -> tuple:
    out = []
    for j in range(c.m):
        row = []
        for a in range(c.k):
            acc = c.zero()
            for kk in range(c.m):
                if mat[j][kk] and arr[kk][a]:
                    acc = acc + mat[j][kk] * arr[kk][a]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def covariant_equation_residual(G: LeafGeom, T: InfTriple, p: AffFunc, theta) -> tuple:
    """Covariant form of the mu-equation, evaluated on ``u = d/dx^i``.

    Entry ``[i][a]`` is the ``e^a`` component of::

        nabla_v(theta(d_i)) - theta([v, d_i]) + [eta, theta(d_i)] - nabla_{d_i} eta + R(v, d_i)

    where ``v^j = d_k h psi^{kj}`` and ``R_{kl,a} = (psi^{-1})_{ki} K^{ij}_a (psi^{-1})_{lj}``.
    """
    c = T.chart
    m, k = c.m, c.k
    base = c.base
    zero = c.zero()
    pinv = G.psi_inv
    theta = tuple(tuple(r) for r in theta)
    dh = [p.f.diff(n) for n in base]
    v = [sum((dh[kk] * T.psi[kk][j] for kk in range(m) if dh[kk] and T.psi[kk][j]), zero) for j in range(m)]

    def nabla(direction, sec):
        # (nabla_X s)_b = X(s_b) + X^k Gamma^a_{kb} s_a  (dual connection on E*)
        out = []
        for b in range(k):
            acc = zero
            for kk in range(m):
                if not direction[kk]:
                    continue
                dsb = sec[b].diff(base[kk])
                if dsb:
                    acc = acc + direction[kk] * dsb
                for a in range(k):
                    if G.gamma[kk][a][b] and sec[a]:
                        acc = acc + direction[kk] * G.gamma[kk][a][b] * sec[a]
            out.append(acc)
        return out

    def rform(kk, ll, a):
        acc = zero
        for i in range(m):
            if not pinv[kk][i]:
                continue
            for j in range(m):
                if T.kform[i][j][a] and pinv[ll][j]:
                    acc = acc + pinv[kk][i] * T.kform[i][j][a] * pinv[ll][j]
        return acc

    out = []
    for i in range(m):
        di = [c.table.one() if j == i else zero for j in range(m)]
        th_i = [theta[i][a] for a in range(k)]
        first = nabla(v, th_i)
        # [v, d_i] = -d_i(v^j) d_j
        br = [-v[j].diff(base[i]) for j in range(m)]
        th_br = [sum((br[j] * theta[j][a] for j in range(m) if br[j] and theta[j][a]), zero) for a in range(k)]
        fb = [sum((T.lam[a][b][cc] * p.eta[a] * th_i[b] for a in range(k) for b in range(k)
                   if T.lam[a][b][cc] and p.eta[a] and th_i[b]), zero) for cc in range(k)]
        neta = nabla(di, p.eta)
        row = []
        for a in range(k):
            rv = sum((v[kk] * rform(kk, i, a) for kk in range(m) if v[kk]), zero)
            row.append(first[a] - th_br[a] + fb[a] - neta[a] + rv)
        out.append(tuple(row))
    return tuple(out)
