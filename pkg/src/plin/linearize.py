"""Linearization of vector fields tangent to S = {y = 0}."""
from __future__ import annotations

from dataclasses import dataclass

from plin.errors import TangencyError
from plin.expr import RatFunc
from plin.infinitesimal import AffFunc, aff_mul
from plin.poisson import Chart, VectorField, apply_vf, lie_bracket


@dataclass(frozen=True)
class LinVF:
    """Linear vector field ``v^i(x) d/dx^i + A^a_b(x) y^b d/dy^a``; ``a[a][b] = A^a_b``."""

    chart: Chart
    v: tuple
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "a", tuple(tuple(r) for r in self.a))
        c = self.chart
        if len(self.v) != c.m or len(self.a) != c.k or any(len(r) != c.k for r in self.a):
            raise ValueError("LinVF shape does not match the chart")
        for f in (*self.v, *(g for r in self.a for g in r)):
            if not c.is_basic(f):
                raise ValueError(f"linear vector field coefficients must not depend on y: {f}")

    @classmethod
    def zero(cls, chart: Chart) -> "LinVF":
        z = chart.zero()
        return cls(chart, (z,) * chart.m, ((z,) * chart.k,) * chart.k)

    def to_vector_field(self) -> VectorField:
        c = self.chart
        y = [c.var(n) for n in c.normal]
        normal = []
        for a in range(c.k):
            acc = c.zero()
            for b in range(c.k):
                if self.a[a][b]:
                    acc = acc + self.a[a][b] * y[b]
            normal.append(acc)
        return VectorField(c, tuple(self.v) + tuple(normal))

    def __sub__(self, other: "LinVF") -> "LinVF":
        return LinVF(self.chart, tuple(p - q for p, q in zip(self.v, other.v)),
                     tuple(tuple(p - q for p, q in zip(r, s)) for r, s in zip(self.a, other.a)))

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.v) and all(f.is_zero() for r in self.a for f in r)


@dataclass(frozen=True)
class TorsionField:
    """``T^j_b(x) y^b d/dx^j``; ``t[j][b] = T^j_b``."""

    chart: Chart
    t: tuple

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(tuple(r) for r in self.t))

    def is_zero(self) -> bool:
        return all(f.is_zero() for r in self.t for f in r)


@dataclass(frozen=True)
class EpsSeries:
    """Coefficients of ``eps^p`` (``p = 0..order``) of the rescaled pullback."""

    chart: Chart
    coeffs: dict
    order: int

    def __getitem__(self, p: int) -> VectorField:
        return self.coeffs[p]


def _require_tangent(X: VectorField):
    c = X.chart
    for name, comp in zip(c.normal, X.normal_part):
        if not c.on_s(comp).is_zero():
            raise TangencyError(f"vector field is not tangent to S: d/d{name} component {comp} does not vanish at y = 0")


def _eps_name(chart: Chart) -> str:
    name = "eps"
    while name in chart.table:
        name += "_"
    return name


def rescale_pullback(X: VectorField, order: int = 2) -> EpsSeries:
    """Expand the pullback of X under ``y -> eps*y`` (normal components divided by eps)."""
    c = X.chart
    _require_tangent(X)
    eps = _eps_name(c)
    big = c.table.extend(eps)
    e = big.var(eps)
    scaled = {n: e * big.var(n) for n in c.normal}
    comps = [f.to_table(big).subs(scaled) for f in X.comp]
    coeffs = {}
    for p in range(order + 1):
        out = []
        for mu, g in enumerate(comps):
            power = p if mu < c.m else p + 1
            out.append(g.series_coeff([eps], [power]).to_table(c.table))
        coeffs[p] = VectorField(c, tuple(out))
    return EpsSeries(c, coeffs, order)


def variation(X: VectorField) -> LinVF:
    """First variation ``v^i = X^i(x, 0)``, ``A^a_b = dX^a/dy^b (x, 0)``."""
    c = X.chart
    _require_tangent(X)
    v = [c.on_s(f) for f in X.base_part]
    a = [[c.on_s(f.diff(nb)) for nb in c.normal] for f in X.normal_part]
    return LinVF(c, v, a)


def torsion(X: VectorField) -> TorsionField:
    """Dynamical torsion ``T^j_b = dX^j/dy^b (x, 0)`` relative to the chart transversal."""
    c = X.chart
    _require_tangent(X)
    return TorsionField(c, [[c.on_s(f.diff(nb)) for nb in c.normal] for f in X.base_part])


def invariance_check(X: VectorField) -> bool:
    return torsion(X).is_zero()


def lie_derivative_aff(L: LinVF, p: AffFunc) -> AffFunc:
    c = L.chart
    v = VectorField(c, tuple(L.v) + (c.zero(),) * c.k)
    eta = []
    for b in range(c.k):
        acc = apply_vf(v, p.eta[b])
        for a in range(c.k):
            if L.a[a][b] and p.eta[a]:
                acc = acc + L.a[a][b] * p.eta[a]
        eta.append(acc)
    return AffFunc(c, apply_vf(v, p.f), eta)


@dataclass(frozen=True)
class FirstIntegralReport:
    base: bool
    linear: bool

    def __bool__(self):
        return self.base and self.linear


def first_integral_check(L: LinVF, p: AffFunc) -> FirstIntegralReport:
    d = lie_derivative_aff(L, p)
    return FirstIntegralReport(d.f.is_zero(), all(e.is_zero() for e in d.eta))


def linvf_bracket(L1: LinVF, L2: LinVF) -> LinVF:
    """Commutator of linear vector fields (the result is linear again)."""
    return variation(lie_bracket(L1.to_vector_field(), L2.to_vector_field()))


def var_commutator_residual(X1: VectorField, X2: VectorField) -> LinVF:
    """``var[X1, X2] - [var X1, var X2]``; vanishes for tangent fields."""
    _require_tangent(X1)
    _require_tangent(X2)
    return variation(lie_bracket(X1, X2)) - linvf_bracket(variation(X1), variation(X2))


def derivation_residual(L: LinVF, p: AffFunc, q: AffFunc) -> AffFunc:
    """``L(pq) - L(p) q - p L(q)`` for the truncated product."""
    return lie_derivative_aff(L, aff_mul(p, q)) - aff_mul(lie_derivative_aff(L, p), q) - aff_mul(p, lie_derivative_aff(L, q))
