"""Hamiltonization of first variation systems and changes of transversal.

A change of transversal is a matrix ``delta^i_a(x)``: the new complement is
spanned by ``d/dy^a + delta^i_a d/dx^i``.  Its partner morphism is
``mu = -delta`` with ``mu(dx^i) = mu^i_a e^a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from plin.errors import NonPolynomialError, SingularError
from plin.expr import RatFunc
from plin.infinitesimal import (
    AffFunc,
    InfTriple,
    _add,
    _neg,
    aff_bracket,
    aff_of,
    base_differential,
    cov,
    extract_triple,
    fiber_bracket,
    kappa,
)
from plin.linalg import solve_rational
from plin.linearize import LinVF, lie_derivative_aff, variation
from plin.poisson import Bivector, Chart, hamiltonian_vf


def _matrix(chart: Chart, rows, name: str) -> tuple:
    rows = tuple(tuple(chart.parse(e) if isinstance(e, str) else e for e in r) for r in rows)
    if len(rows) != chart.m or any(len(r) != chart.k for r in rows):
        raise ValueError(f"{name} must be an m x k matrix ({chart.m} x {chart.k})")
    for f in (g for r in rows for g in r):
        if not chart.is_basic(f):
            raise ValueError(f"{name} entries must not depend on the normal coordinates: {f}")
    return rows


def _zero_matrix(chart: Chart) -> tuple:
    return ((chart.zero(),) * chart.k,) * chart.m


@dataclass(frozen=True)
class TransChange:
    chart: Chart
    delta: tuple

    def __post_init__(self):
        object.__setattr__(self, "delta", _matrix(self.chart, self.delta, "delta"))

    @classmethod
    def zero(cls, chart: Chart) -> "TransChange":
        return cls(chart, _zero_matrix(chart))

    @classmethod
    def from_entries(cls, chart: Chart, entries: dict) -> "TransChange":
        """Build from 0-based ``{(i, a): expr}``; missing entries are zero."""
        rows = [list(r) for r in _zero_matrix(chart)]
        for (i, a), v in entries.items():
            rows[i][a] = chart.parse(v) if isinstance(v, str) else (v if isinstance(v, RatFunc) else chart.table.const(v))
        return cls(chart, rows)

    def mu(self) -> "MuMorphism":
        return MuMorphism(self.chart, tuple(tuple(-f for f in r) for r in self.delta))


@dataclass(frozen=True)
class MuMorphism:
    chart: Chart
    mu: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu", _matrix(self.chart, self.mu, "mu"))

    @classmethod
    def zero(cls, chart: Chart) -> "MuMorphism":
        return cls(chart, _zero_matrix(chart))

    @classmethod
    def from_entries(cls, chart: Chart, entries: dict) -> "MuMorphism":
        d = TransChange.from_entries(chart, entries)
        return cls(chart, d.delta)

    def delta(self) -> TransChange:
        return TransChange(self.chart, tuple(tuple(-f for f in r) for r in self.mu))

    def apply(self, alpha) -> tuple:
        """``mu(alpha)_a = sum_i alpha_i mu^i_a``."""
        c = self.chart
        out = []
        for a in range(c.k):
            acc = c.zero()
            for i in range(c.m):
                if alpha[i] and self.mu[i][a]:
                    acc = acc + alpha[i] * self.mu[i][a]
            out.append(acc)
        return tuple(out)

    def is_zero(self) -> bool:
        return all(f.is_zero() for r in self.mu for f in r)


@dataclass(frozen=True)
class HamResidual:
    """``r[j][b] = R^j_b``."""

    chart: Chart
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(tuple(row) for row in self.r))

    def is_zero(self) -> bool:
        return all(f.is_zero() for row in self.r for f in row)

    def nonzero(self) -> list[tuple[int, int, RatFunc]]:
        return [(j, b, f) for j, row in enumerate(self.r) for b, f in enumerate(row) if f]


def _unit_form(chart: Chart, j: int) -> tuple:
    one, zero = chart.table.one(), chart.zero()
    return tuple(one if i == j else zero for i in range(chart.m))


def affine_hamiltonian(H: RatFunc, chart: Chart) -> AffFunc:
    """The affine Hamiltonian ``h (+) eta`` read off the 1-jet of H along S."""
    return aff_of(H, chart)


def ham_residual(T: InfTriple, p: AffFunc) -> HamResidual:
    """``R^j_b = sum_i K^{ij}_b d_i h - (D_{dx^j} eta)_b``; equals the torsion of X_H."""
    c = T.chart
    dh = base_differential(T, p.f)
    rows = []
    for j in range(c.m):
        ej = _unit_form(c, j)
        rows.append(_add(kappa(T, dh, ej), _neg(cov(T, ej, p.eta))) if c.k else ())
    return HamResidual(c, rows)


@dataclass(frozen=True)
class HamVerdict:
    triple: InfTriple
    hamiltonian: AffFunc
    residual: HamResidual
    hamiltonizable: bool
    # generator name -> L_var(phi) - {p, phi}; only filled in when hamiltonizable
    certificate: dict | None

    def __bool__(self):
        return self.hamiltonizable


def derivation_defect(T: InfTriple, L: LinVF, p: AffFunc) -> dict[str, AffFunc]:
    """``L(phi) - {p, phi}`` on every generator ``phi`` of the affine algebra."""
    c = T.chart
    out = {}
    for name in c.names:
        phi = AffFunc.generator(c, name)
        out[name] = lie_derivative_aff(L, phi) - aff_bracket(T, p, phi)
    return out


def hamiltonization_check(P: Bivector, H: RatFunc, T: InfTriple | None = None) -> HamVerdict:
    c = P.chart
    T = T or extract_triple(P)
    p = affine_hamiltonian(H, c)
    R = ham_residual(T, p)
    ok = R.is_zero()
    cert = None
    if ok:
        cert = derivation_defect(T, variation(hamiltonian_vf(P, H)), p)
    return HamVerdict(T, p, R, ok, cert)


# -- transversal changes ----------------------------------------------------

def transform_triple(T: InfTriple, d: TransChange) -> InfTriple:
    """The triple seen from the transversal ``span{d/dy^a + delta^i_a d/dx^i}``."""
    c = T.chart
    m, k = c.m, c.k
    mu = d.mu()
    cols = [tuple(mu.mu[i]) for i in range(m)]   # mu(dx^i) as a section of E*
    dcon = []
    for i in range(m):
        block = []
        for a in range(k):
            row = []
            for b in range(k):
                acc = T.dcon[i][a][b]
                for cc in range(k):
                    if mu.mu[i][cc] and T.lam[cc][a][b]:
                        acc = acc + mu.mu[i][cc] * T.lam[cc][a][b]
                row.append(acc)
            block.append(row)
        dcon.append(block)
    zero_k = (c.zero(),) * k
    kform = [[zero_k] * m for _ in range(m)]
    for i in range(m):
        ei = _unit_form(c, i)
        for j in range(i + 1, m):
            ej = _unit_form(c, j)
            dpsi = base_differential(T, T.psi[i][j])
            new = _add(
                T.kform[i][j],
                cov(T, ei, cols[j]),
                _neg(cov(T, ej, cols[i])),
                _neg(mu.apply(dpsi)),
                fiber_bracket(T, cols[i], cols[j]),
            )
            kform[i][j] = new
            kform[j][i] = _neg(new)
    return T.replace(dcon=dcon, kform=kform)


def _laplace_det(rows, cols, mat, zero, one, memo):
    """Determinant of the minor on ``rows`` x ``cols`` by cofactor expansion (division free)."""
    if not rows:
        return one
    key = (rows, cols)
    if key not in memo:
        r, rest = rows[0], rows[1:]
        acc = zero
        for pos, c in enumerate(cols):
            if mat[r][c]:
                sub = _laplace_det(rest, cols[:pos] + cols[pos + 1:], mat, zero, one, memo)
                if sub:
                    acc = acc + mat[r][c] * sub if pos % 2 == 0 else acc - mat[r][c] * sub
        memo[key] = acc
    return memo[key]


def chart_realize(P: Bivector, d: TransChange) -> Bivector:
    """Express P in coordinates ``(x~, y~)`` with ``(x, y) = (x~ + delta(x~) y~, y~)``.

    The Jacobian is ``J = [[A, delta], [0, 1]]`` with ``A = 1 + d(delta y)/dx``, so
    ``det(A) J^{-1} = [[adj A, -adj(A) delta], [0, det(A)]]`` is polynomial in the
    entries of delta and the new components are ``N P N^T / det(A)^2``.
    """
    c = P.chart
    m, k, n = c.m, c.k, c.dim
    zero, one = c.zero(), c.table.one()
    y = [c.var(name) for name in c.normal]
    a_mat = []
    for i in range(m):
        dy = sum((d.delta[i][a] * y[a] for a in range(k) if d.delta[i][a]), zero)
        a_mat.append([(one if i == j else zero) + dy.diff(c.base[j]) for j in range(m)])
    memo: dict = {}
    idx = tuple(range(m))
    det_a = _laplace_det(idx, idx, a_mat, zero, one, memo)
    if c.on_s(det_a).is_zero():
        raise SingularError("the chart map is singular along S")
    adj = [[zero] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = _laplace_det(tuple(r for r in idx if r != i), tuple(q for q in idx if q != j), a_mat, zero, one, memo)
            # adj(A)[j][i] is the (i, j) cofactor
            adj[j][i] = minor if (i + j) % 2 == 0 else -minor
    N = [[zero] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            N[i][j] = adj[i][j]
        for a in range(k):
            N[i][m + a] = -sum((adj[i][j] * d.delta[j][a] for j in range(m) if adj[i][j] and d.delta[j][a]), zero)
    for a in range(k):
        N[m + a][m + a] = det_a
    mapping = {name: c.var(name) + sum((d.delta[i][a] * y[a] for a in range(k) if d.delta[i][a]), zero)
               for i, name in enumerate(c.base)}
    moved = [[P.comp[r][s].subs(mapping) if P.comp[r][s] else zero for s in range(n)] for r in range(n)]
    scale = det_a * det_a
    entries = {}
    for mu in range(n):
        # row mu of N * moved
        left = [sum((N[mu][r] * moved[r][s] for r in range(n) if N[mu][r] and moved[r][s]), zero) for s in range(n)]
        for nu in range(mu + 1, n):
            acc = sum((left[s] * N[nu][s] for s in range(n) if left[s] and N[nu][s]), zero)
            entries[(mu, nu)] = acc / scale if acc else acc
    return Bivector.from_upper(c, entries)


def transform_aff(mu: MuMorphism, p: AffFunc) -> AffFunc:
    """The isomorphism ``f (+) eta -> f (+) (eta - mu(df))`` between the two affine algebras."""
    df = tuple(p.f.diff(n) for n in p.chart.base)
    return AffFunc(p.chart, p.f, tuple(e - x for e, x in zip(p.eta, mu.apply(df))))


def iso_check(T: InfTriple, Tt: InfTriple, mu: MuMorphism, p: AffFunc, q: AffFunc) -> AffFunc:
    """``Phi{p, q} - {Phi p, Phi q}~``; identically zero when ``Tt`` comes from ``mu``."""
    return transform_aff(mu, aff_bracket(T, p, q)) - aff_bracket(Tt, transform_aff(mu, p), transform_aff(mu, q))


# -- the mu-equation --------------------------------------------------------

def mu_residual(T: InfTriple, p: AffFunc, mu: MuMorphism) -> HamResidual:
    """Residual of the equation for a transversal change that Hamiltonizes var X_H.

    For index ``b`` and base direction ``j``::

        [v_h, mu_b]^j + (d_i h D^{ia}_b - lam^{ac}_b eta_c) mu^j_a
            + d_i eta_b psi^{ij} - eta_a D^{ja}_b + d_i h K^{ij}_b

    with ``v_h^j = d_i h psi^{ij}``.  For ``mu = 0`` this is :func:`ham_residual`.
    """
    c = T.chart
    m, k = c.m, c.k
    base = c.base
    zero = c.zero()
    dh = [p.f.diff(n) for n in base]
    deta = [[e.diff(n) for n in base] for e in p.eta]
    vh = []
    for j in range(m):
        acc = zero
        for i in range(m):
            if dh[i] and T.psi[i][j]:
                acc = acc + dh[i] * T.psi[i][j]
        vh.append(acc)
    rows = []
    for j in range(m):
        row = []
        for b in range(k):
            acc = zero
            # [v_h, mu_b]^j
            for i in range(m):
                if vh[i]:
                    acc = acc + vh[i] * mu.mu[j][b].diff(base[i])
                if mu.mu[i][b]:
                    acc = acc - mu.mu[i][b] * vh[j].diff(base[i])
            for a in range(k):
                if not mu.mu[j][a]:
                    continue
                coef = zero
                for i in range(m):
                    if dh[i] and T.dcon[i][a][b]:
                        coef = coef + dh[i] * T.dcon[i][a][b]
                for cc in range(k):
                    if T.lam[a][cc][b] and p.eta[cc]:
                        coef = coef - T.lam[a][cc][b] * p.eta[cc]
                if coef:
                    acc = acc + coef * mu.mu[j][a]
            for i in range(m):
                if deta[b][i] and T.psi[i][j]:
                    acc = acc + deta[b][i] * T.psi[i][j]
                if dh[i] and T.kform[i][j][b]:
                    acc = acc + dh[i] * T.kform[i][j][b]
            for a in range(k):
                if p.eta[a] and T.dcon[j][a][b]:
                    acc = acc - p.eta[a] * T.dcon[j][a][b]
            row.append(acc)
        rows.append(tuple(row))
    return HamResidual(c, rows)


def _monomials(n: int, maxdeg: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= maxdeg, lowest degree first."""
    out = []
    for deg in range(maxdeg + 1):
        block = []
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for v in combo:
                e[v] += 1
            block.append(tuple(e))
        out.extend(sorted(block, reverse=True))
    return out


def _require_polynomial(T: InfTriple, p: AffFunc):
    from plin.infinitesimal import _flatten

    for f in (*_flatten((T.psi, T.lam, T.dcon, T.kform)), p.f, *p.eta):
        if not f.is_polynomial():
            raise NonPolynomialError(f"solve_mu needs polynomial data, got {f}")


def solve_mu(T: InfTriple, p: AffFunc, maxdeg: int) -> MuMorphism | None:
    """Search for a polynomial ``mu`` of total degree <= maxdeg with zero :func:`mu_residual`.

    The residual is affine in the unknown coefficients, so each column of the
    linear system is the residual of a single basis monomial minus the
    constant term.  Unknowns are ordered lowest degree first and free ones are
    set to zero, which keeps the answer deterministic and low-degree.
    """
    if maxdeg < 0:
        raise ValueError("maxdeg must be non-negative")
    _require_polynomial(T, p)
    c = T.chart
    m, k = c.m, c.k
    nvars = len(c.names)
    base_idx = [c.table.index(n) for n in c.base]
    monos = []
    for e in _monomials(m, maxdeg):
        full = [0] * nvars
        for pos, ex in zip(base_idx, e):
            full[pos] = ex
        monos.append(tuple(full))
    unknowns = [(mono, i, a) for mono in monos for i in range(m) for a in range(k)]
    # stable order: degree block, then monomial, then entry
    const = mu_residual(T, p, MuMorphism.zero(c))
    columns = []
    for mono, i, a in unknowns:
        rows = [list(r) for r in _zero_matrix(c)]
        rows[i][a] = c.table.from_terms({mono: 1})
        res = mu_residual(T, p, MuMorphism(c, rows))
        columns.append([[res.r[j][b] - const.r[j][b] for b in range(k)] for j in range(m)])
    equations: dict[tuple, list[Fraction]] = {}
    rhs: dict[tuple, Fraction] = {}
    n_unk = len(unknowns)

    def coeffs(f: RatFunc):
        if not f.is_polynomial():
            raise NonPolynomialError(f"non-polynomial residual entry {f}")
        return f.num_terms()

    for j in range(m):
        for b in range(k):
            for mono, v in coeffs(const.r[j][b]).items():
                rhs[(j, b, mono)] = -Fraction(v)
                equations.setdefault((j, b, mono), [Fraction(0)] * n_unk)
            for u in range(n_unk):
                for mono, v in coeffs(columns[u][j][b]).items():
                    equations.setdefault((j, b, mono), [Fraction(0)] * n_unk)[u] += Fraction(v)
    keys = sorted(equations)
    if not keys:
        return MuMorphism.zero(c)
    sol = solve_rational([equations[key] for key in keys], [rhs.get(key, Fraction(0)) for key in keys])
    if sol is None:
        return None
    rows = [[c.zero()] * k for _ in range(m)]
    for (mono, i, a), val in zip(unknowns, sol):
        if val:
            rows[i][a] = rows[i][a] + c.table.from_terms({mono: val})
    result = MuMorphism(c, rows)
    if not mu_residual(T, p, result).is_zero():  # pragma: no cover - solver self-check
        raise ArithmeticError("solve_mu produced a non-solution")
    return result
