"""Infinitesimal data of S = {y = 0} and the bracket on fiberwise affine functions.

A triple ``(psi, lam, dcon, kform)`` stores, as functions of x,

* ``psi[i][j]``      the induced Poisson tensor on S,
* ``lam[a][b][c]``   the fiberwise Lie bracket ``[e^a, e^b] = lam^{ab}_c e^c`` on E*,
* ``dcon[i][a][b]``  the contravariant derivative ``D_{dx^i} e^a = D^{ia}_b e^b``,
* ``kform[i][j][a]`` the tensor ``K(dx^i, dx^j) = K^{ij}_a e^a``.

Sections of E* and 1-forms on S are plain tuples of rational functions
(length k and m respectively).  A fiberwise affine function ``f + eta_a y^a``
is an :class:`AffFunc`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from plin.errors import NotAUnitError, NotPoissonError, TangencyError
from plin.expr import RatFunc
from plin.poisson import (
    Bivector,
    Chart,
    _bracket,
    _form_bracket,
    check_tangency,
    coordinate_form,
    leaf_jacobiator,
    one_form_bracket,
    poisson_bracket,
    sharp,
)

Section = tuple[RatFunc, ...]


@dataclass(frozen=True)
class InfTriple:
    chart: Chart
    psi: tuple
    lam: tuple
    dcon: tuple
    kform: tuple

    def __post_init__(self):
        m, k = self.chart.m, self.chart.k
        psi = tuple(tuple(r) for r in self.psi)
        lam = tuple(tuple(tuple(c) for c in r) for r in self.lam)
        dcon = tuple(tuple(tuple(c) for c in r) for r in self.dcon)
        kform = tuple(tuple(tuple(c) for c in r) for r in self.kform)
        _check_shape(psi, (m, m), "psi")
        _check_shape(lam, (k, k, k), "lam")
        _check_shape(dcon, (m, k, k), "dcon")
        _check_shape(kform, (m, m, k), "kform")
        for name, arr in (("psi", psi), ("lam", lam), ("dcon", dcon), ("kform", kform)):
            for f in _flatten(arr):
                if not self.chart.is_basic(f):
                    raise ValueError(f"{name} entries must not depend on the normal coordinates: {f}")
        for i in range(m):
            for j in range(m):
                if psi[i][j] != -psi[j][i]:
                    raise ValueError("psi must be antisymmetric")
                if any(kform[i][j][a] != -kform[j][i][a] for a in range(k)):
                    raise ValueError("kform must be antisymmetric in its upper pair")
        for a in range(k):
            for b in range(k):
                if any(lam[a][b][c] != -lam[b][a][c] for c in range(k)):
                    raise ValueError("lam must be antisymmetric in its upper pair")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "dcon", dcon)
        object.__setattr__(self, "kform", kform)

    @property
    def m(self) -> int:
        return self.chart.m

    @property
    def k(self) -> int:
        return self.chart.k

    def zero_section(self) -> Section:
        return (self.chart.zero(),) * self.k

    def replace(self, **changes) -> "InfTriple":
        fields = dict(psi=self.psi, lam=self.lam, dcon=self.dcon, kform=self.kform)
        fields.update(changes)
        return InfTriple(self.chart, **fields)


def _check_shape(arr, shape, name):
    def rec(a, dims):
        if not dims:
            if not isinstance(a, RatFunc):
                raise TypeError(f"{name} entries must be RatFunc")
            return
        if len(a) != dims[0]:
            raise ValueError(f"{name} must have shape {shape}")
        for sub in a:
            rec(sub, dims[1:])

    rec(arr, shape)


def _flatten(arr):
    if isinstance(arr, RatFunc):
        yield arr
    else:
        for a in arr:
            yield from _flatten(a)


# -- fiberwise affine functions ---------------------------------------------

@dataclass(frozen=True)
class AffFunc:
    """``f(x) + sum_a eta_a(x) y^a``, stored as its coefficient data ``(f, eta)``."""

    chart: Chart
    f: RatFunc
    eta: Section

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(self.eta))
        if len(self.eta) != self.chart.k:
            raise ValueError("eta must have one component per normal coordinate")
        for g in (self.f, *self.eta):
            if not self.chart.is_basic(g):
                raise ValueError(f"affine-function coefficients must not depend on y: {g}")

    @classmethod
    def base(cls, chart: Chart, f: RatFunc) -> "AffFunc":
        return cls(chart, f, (chart.zero(),) * chart.k)

    @classmethod
    def linear(cls, chart: Chart, eta: Sequence[RatFunc]) -> "AffFunc":
        return cls(chart, chart.zero(), tuple(eta))

    @classmethod
    def generator(cls, chart: Chart, name: str) -> "AffFunc":
        """``x^i + 0`` for a base name, ``0 + e^a`` for a normal name."""
        if name in chart.base:
            return cls.base(chart, chart.var(name))
        a = chart.normal.index(name)
        one, zero = chart.table.one(), chart.zero()
        return cls.linear(chart, [one if b == a else zero for b in range(chart.k)])

    def __add__(self, other: "AffFunc") -> "AffFunc":
        return AffFunc(self.chart, self.f + other.f, tuple(a + b for a, b in zip(self.eta, other.eta)))

    def __sub__(self, other: "AffFunc") -> "AffFunc":
        return AffFunc(self.chart, self.f - other.f, tuple(a - b for a, b in zip(self.eta, other.eta)))

    def __neg__(self) -> "AffFunc":
        return AffFunc(self.chart, -self.f, tuple(-a for a in self.eta))

    def scale(self, c) -> "AffFunc":
        return AffFunc(self.chart, self.f * c, tuple(a * c for a in self.eta))

    def is_zero(self) -> bool:
        return self.f.is_zero() and all(a.is_zero() for a in self.eta)

    def as_function(self) -> RatFunc:
        acc = self.f
        for e, n in zip(self.eta, self.chart.normal):
            if e:
                acc = acc + e * self.chart.var(n)
        return acc

    def __str__(self):
        return f"{self.f} (+) [{', '.join(str(e) for e in self.eta)}]"


def aff_mul(p: AffFunc, q: AffFunc) -> AffFunc:
    """Truncated product ``(f1 f2, f1 eta2 + f2 eta1)``."""
    return AffFunc(p.chart, p.f * q.f, tuple(p.f * b + q.f * a for a, b in zip(p.eta, q.eta)))


def _unit_check(chart: Chart, F: RatFunc):
    if chart.normal and not F.is_polynomial():
        den = RatFunc._raw(F.table, F.den, F.table.ring.one)
        if chart.on_s(den).is_zero():
            raise NotAUnitError(f"denominator of {F} vanishes on S")


def aff_of(F: RatFunc, chart: Chart) -> AffFunc:
    """Linearization ``F -> F|_S (+) dF/dy|_S``."""
    _unit_check(chart, F)
    return AffFunc(chart, chart.on_s(F), tuple(chart.on_s(F.diff(n)) for n in chart.normal))


# -- the triple and its operators -------------------------------------------

def _jet1(chart: Chart, F: RatFunc) -> tuple[RatFunc, list[RatFunc]]:
    a = aff_of(F, chart)
    return a.f, list(a.eta)


def extract_triple(P: Bivector, c: Chart | None = None) -> InfTriple:
    """Read the triple off the 1-jet of P along S."""
    c = c or P.chart
    if not check_tangency(P, c):
        raise TangencyError("bivector is not tangent to S = {y = 0}")
    m, k = c.m, c.k
    jets = [[_jet1(c, P.comp[mu][nu]) for nu in range(c.dim)] for mu in range(c.dim)]
    psi = [[jets[i][j][0] for j in range(m)] for i in range(m)]
    kform = [[jets[i][j][1] for j in range(m)] for i in range(m)]
    dcon = [[jets[i][m + a][1] for a in range(k)] for i in range(m)]
    lam = [[jets[m + a][m + b][1] for b in range(k)] for a in range(k)]
    return InfTriple(c, psi, lam, dcon, kform)


def extract_triple_via_algebroid(P: Bivector, c: Chart | None = None) -> InfTriple:
    """Same data from brackets of coordinate differentials in the cotangent algebroid.

    ``psi`` comes from the anchor, ``K``, ``D`` and ``lam`` are the dy-components on
    S of ``[dx^i, dx^j]``, ``[dx^i, dy^a]`` and ``[dy^a, dy^b]``.
    """
    c = c or P.chart
    if not check_tangency(P, c):
        raise TangencyError("bivector is not tangent to S = {y = 0}")
    m, k, n = c.m, c.k, c.dim
    for row in P.comp:
        for f in row:
            _unit_check(c, f)
    forms = [coordinate_form(c, mu) for mu in range(n)]

    def dy_part(mu, nu):
        br = one_form_bracket(P, forms[mu], forms[nu])
        return [c.on_s(br.comp[m + a]) for a in range(k)]

    psi = []
    for i in range(m):
        anchor = sharp(P, forms[i]).comp
        psi.append([c.on_s(anchor[j]) for j in range(m)])
    kform = [[dy_part(i, j) for j in range(m)] for i in range(m)]
    dcon = [[dy_part(i, m + a) for a in range(k)] for i in range(m)]
    lam = [[dy_part(m + a, m + b) for b in range(k)] for a in range(k)]
    return InfTriple(c, psi, lam, dcon, kform)


def base_bracket(T: InfTriple, f: RatFunc, g: RatFunc) -> RatFunc:
    return _bracket(T.psi, T.chart.base, f, g)


def base_form_bracket(T: InfTriple, a: Sequence[RatFunc], b: Sequence[RatFunc]) -> Section:
    """Bracket of 1-forms on (S, psi)."""
    return tuple(_form_bracket(T.psi, T.chart.base, a, b, T.chart.zero()))


def base_differential(T: InfTriple, f: RatFunc) -> Section:
    return tuple(f.diff(n) for n in T.chart.base)


def cov(T: InfTriple, alpha: Sequence[RatFunc], eta: Sequence[RatFunc]) -> Section:
    """Contravariant derivative ``D_alpha eta``."""
    m, k = T.m, T.k
    zero = T.chart.zero()
    grads = [[e.diff(n) for n in T.chart.base] for e in eta]
    out = []
    for b in range(k):
        acc = zero
        for j in range(m):
            if not alpha[j]:
                continue
            inner = zero
            for a in range(k):
                if T.dcon[j][a][b] and eta[a]:
                    inner = inner + T.dcon[j][a][b] * eta[a]
            for i in range(m):
                if T.psi[j][i] and grads[b][i]:
                    inner = inner + T.psi[j][i] * grads[b][i]
            if inner:
                acc = acc + alpha[j] * inner
        out.append(acc)
    return tuple(out)


def fiber_bracket(T: InfTriple, e1: Sequence[RatFunc], e2: Sequence[RatFunc]) -> Section:
    k = T.k
    zero = T.chart.zero()
    out = []
    for c in range(k):
        acc = zero
        for a in range(k):
            if not e1[a]:
                continue
            for b in range(k):
                if e2[b] and T.lam[a][b][c]:
                    acc = acc + T.lam[a][b][c] * e1[a] * e2[b]
        out.append(acc)
    return tuple(out)


def kappa(T: InfTriple, alpha: Sequence[RatFunc], beta: Sequence[RatFunc]) -> Section:
    m, k = T.m, T.k
    zero = T.chart.zero()
    out = []
    for a in range(k):
        acc = zero
        for i in range(m):
            if not alpha[i]:
                continue
            for j in range(m):
                if beta[j] and T.kform[i][j][a]:
                    acc = acc + alpha[i] * beta[j] * T.kform[i][j][a]
        out.append(acc)
    return tuple(out)


def _add(*sections: Section) -> Section:
    return tuple(sum(parts[1:], parts[0]) for parts in zip(*sections))


def _neg(s: Section) -> Section:
    return tuple(-x for x in s)


def curvature(T: InfTriple, alpha, beta, eta) -> Section:
    """``Curv^D(alpha, beta) eta = [D_alpha, D_beta] eta - D_{[alpha, beta]} eta``."""
    ab = base_form_bracket(T, alpha, beta)
    return _add(cov(T, alpha, cov(T, beta, eta)), _neg(cov(T, beta, cov(T, alpha, eta))), _neg(cov(T, ab, eta)))


def ja1_residual(T: InfTriple, alpha, eta, zeta) -> Section:
    """``[D_alpha, ad_eta] zeta - ad_{D_alpha eta} zeta``."""
    return _add(
        cov(T, alpha, fiber_bracket(T, eta, zeta)),
        _neg(fiber_bracket(T, eta, cov(T, alpha, zeta))),
        _neg(fiber_bracket(T, cov(T, alpha, eta), zeta)),
    )


def ja3_residual(T: InfTriple, alpha, beta, eta) -> Section:
    return _add(curvature(T, alpha, beta, eta), _neg(fiber_bracket(T, kappa(T, alpha, beta), eta)))


def ja2_residual(T: InfTriple, alpha, beta, gamma) -> Section:
    terms = []
    for a, b, c in ((alpha, beta, gamma), (beta, gamma, alpha), (gamma, alpha, beta)):
        terms.append(cov(T, a, kappa(T, b, c)))
        terms.append(kappa(T, a, base_form_bracket(T, b, c)))
    return _add(*terms)


@dataclass(frozen=True)
class TripleReport:
    ja1_residuals: dict
    ja3_residuals: dict
    ja2_residuals: dict
    tensor_residuals: dict

    @property
    def ok(self) -> bool:
        return all(
            v.is_zero()
            for table in (self.ja1_residuals, self.ja3_residuals, self.ja2_residuals, self.tensor_residuals)
            for v in table.values()
        )

    def nonzero(self) -> list[tuple[str, tuple, RatFunc]]:
        out = []
        for name, table in (("ja1", self.ja1_residuals), ("ja3", self.ja3_residuals),
                            ("ja2", self.ja2_residuals), ("tensor", self.tensor_residuals)):
            out.extend((name, key, v) for key, v in table.items() if not v.is_zero())
        return out


def _unit(chart: Chart, n: int, i: int) -> Section:
    one, zero = chart.table.one(), chart.zero()
    return tuple(one if j == i else zero for j in range(n))


def _random_poly(chart: Chart, rng: random.Random, names: Sequence[str], degree: int = 1) -> RatFunc:
    acc = chart.table.const(rng.randint(-3, 3))
    for n in names:
        for d in range(1, degree + 1):
            c = rng.randint(-2, 2)
            if c:
                acc = acc + c * chart.var(n) ** d
    return acc


def check_triple_axioms(T: InfTriple, seed: int = 0) -> TripleReport:
    """Residuals of the Poisson-triple axioms on coordinate generators.

    Keys are ``(i, a, b, c)`` for Ja1, ``(i, j, a, c)`` for Ja3 and
    ``(i, j, l, c)`` for Ja2, ``c`` being the output component.  One extra
    combination with polynomial coefficients probes tensoriality.
    """
    c = T.chart
    bad = [v for v in leaf_jacobiator(T.psi, c).values() if not v.is_zero()]
    if bad:
        raise NotPoissonError("induced tensor psi on S is not Poisson")
    m, k = T.m, T.k
    dx = [_unit(c, m, i) for i in range(m)]
    e = [_unit(c, k, a) for a in range(k)]
    ja1, ja3, ja2 = {}, {}, {}
    for i in range(m):
        for a in range(k):
            for b in range(k):
                for cc, v in enumerate(ja1_residual(T, dx[i], e[a], e[b])):
                    ja1[(i, a, b, cc)] = v
    for i in range(m):
        for j in range(m):
            for a in range(k):
                for cc, v in enumerate(ja3_residual(T, dx[i], dx[j], e[a])):
                    ja3[(i, j, a, cc)] = v
    for i, j, l in product(range(m), repeat=3):
        for cc, v in enumerate(ja2_residual(T, dx[i], dx[j], dx[l])):
            ja2[(i, j, l, cc)] = v
    tensor = {}
    if m and k:
        rng = random.Random(seed)
        forms = [tuple(_random_poly(c, rng, c.base) for _ in range(m)) for _ in range(3)]
        secs = [tuple(_random_poly(c, rng, c.base) for _ in range(k)) for _ in range(2)]
        for cc, v in enumerate(ja1_residual(T, forms[0], secs[0], secs[1])):
            tensor[("ja1", cc)] = v
        for cc, v in enumerate(ja3_residual(T, forms[0], forms[1], secs[0])):
            tensor[("ja3", cc)] = v
        for cc, v in enumerate(ja2_residual(T, *forms)):
            tensor[("ja2", cc)] = v
    return TripleReport(ja1, ja3, ja2, tensor)


def aff_bracket(T: InfTriple, p: AffFunc, q: AffFunc) -> AffFunc:
    """``{f1 + eta1, f2 + eta2} = {f1, f2} + (D_df1 eta2 - D_df2 eta1 + [eta1, eta2] + K(df1, df2))``."""
    df1, df2 = base_differential(T, p.f), base_differential(T, q.f)
    lin = _add(
        cov(T, df1, q.eta),
        _neg(cov(T, df2, p.eta)),
        fiber_bracket(T, p.eta, q.eta),
        kappa(T, df1, df2),
    ) if T.k else ()
    return AffFunc(T.chart, base_bracket(T, p.f, q.f), lin)


def first_order_homomorphism_residual(P: Bivector, F: RatFunc, G: RatFunc, T: InfTriple | None = None) -> AffFunc:
    """``Aff{F, G} - {Aff F, Aff G}``; identically zero for Poisson P tangent to S."""
    c = P.chart
    T = T or extract_triple(P)
    return aff_of(poisson_bracket(P, F, G), c) - aff_bracket(T, aff_of(F, c), aff_of(G, c))
