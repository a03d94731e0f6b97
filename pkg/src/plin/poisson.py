"""Poisson bivectors in adapted charts.

Index conventions used throughout plin:

* chart variables are ordered ``x^1..x^m, y^1..y^k``; the submanifold S is ``{y = 0}``;
* ``{F, G} = sum P^{mu nu} dF/dz^mu dG/dz^nu``;
* ``sharp(alpha)^nu = sum_mu alpha_mu P^{mu nu}``, i.e. ``sharp(alpha) = P(alpha, .)``;
* ``X_H = sharp(dH)``, hence ``X_H(F) = {H, F}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from plin.errors import TangencyError
from plin.expr import RatFunc, VarTable


@dataclass(frozen=True)
class Chart:
    """Adapted chart: base coordinates x (on S) followed by normal coordinates y."""

    base: tuple[str, ...]
    normal: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "normal", tuple(self.normal))
        if not self.base and not self.normal:
            raise ValueError("a chart needs at least one coordinate")
        # VarTable validates identifiers and distinctness
        object.__setattr__(self, "_table", VarTable(self.base + self.normal))

    @property
    def table(self) -> VarTable:
        return self._table

    @property
    def names(self) -> tuple[str, ...]:
        return self.base + self.normal

    @property
    def m(self) -> int:
        return len(self.base)

    @property
    def k(self) -> int:
        return len(self.normal)

    @property
    def dim(self) -> int:
        return self.m + self.k

    def parse(self, text: str) -> RatFunc:
        return self.table.parse(text)

    def var(self, name: str) -> RatFunc:
        return self.table.var(name)

    def zero(self) -> RatFunc:
        return self.table.zero()

    def on_s(self, f: RatFunc) -> RatFunc:
        """Restriction ``f(x, 0)``."""
        return f.restrict(self.normal) if self.normal else f

    def is_basic(self, f: RatFunc) -> bool:
        """True when ``f`` does not depend on the normal coordinates."""
        return not f.depends_on(self.normal)


def _as_ratfunc(chart: Chart, value) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, str):
        return chart.parse(value)
    return chart.table.const(value)


@dataclass(frozen=True)
class Bivector:
    chart: Chart
    comp: tuple[tuple[RatFunc, ...], ...]

    def __post_init__(self):
        n = self.chart.dim
        comp = tuple(tuple(row) for row in self.comp)
        if len(comp) != n or any(len(r) != n for r in comp):
            raise ValueError(f"bivector must be {n}x{n}")
        for i in range(n):
            if comp[i][i]:
                raise ValueError(f"diagonal entry ({i},{i}) of a bivector must vanish")
            for j in range(i + 1, n):
                if comp[i][j] != -comp[j][i]:
                    raise ValueError(f"bivector is not antisymmetric at ({i},{j})")
        object.__setattr__(self, "comp", comp)

    @classmethod
    def from_upper(cls, chart: Chart, entries: Mapping[tuple[int, int], object]) -> "Bivector":
        """Build from 0-based entries ``(mu, nu)`` with ``mu < nu``; the rest are implied."""
        n = chart.dim
        zero = chart.zero()
        rows = [[zero] * n for _ in range(n)]
        for (i, j), v in entries.items():
            if not 0 <= i < j < n:
                raise ValueError(f"entry index {(i, j)} must satisfy 0 <= mu < nu < {n}")
            f = _as_ratfunc(chart, v)
            rows[i][j] = f
            rows[j][i] = -f
        return cls(chart, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, chart: Chart) -> "Bivector":
        return cls.from_upper(chart, {})

    def __getitem__(self, ij):
        i, j = ij
        return self.comp[i][j]


@dataclass(frozen=True)
class OneForm:
    chart: Chart
    comp: tuple[RatFunc, ...]

    def __post_init__(self):
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != self.chart.dim:
            raise ValueError("wrong number of 1-form components")

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.chart, tuple(a - b for a, b in zip(self.comp, other.comp)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comp)


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    comp: tuple[RatFunc, ...]

    def __post_init__(self):
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != self.chart.dim:
            raise ValueError("wrong number of vector-field components")

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, (chart.zero(),) * chart.dim)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.comp, other.comp)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.comp, other.comp)))

    def __call__(self, f: RatFunc) -> RatFunc:
        return apply_vf(self, f)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comp)

    @property
    def base_part(self) -> tuple[RatFunc, ...]:
        return self.comp[: self.chart.m]

    @property
    def normal_part(self) -> tuple[RatFunc, ...]:
        return self.comp[self.chart.m:]


# -- generic helpers over (names, matrix) pairs ------------------------------

def _grad(f: RatFunc, names: Sequence[str]) -> list[RatFunc]:
    return [f.diff(n) for n in names]


def _bracket(comp, names, f: RatFunc, g: RatFunc) -> RatFunc:
    df, dg = _grad(f, names), _grad(g, names)
    acc = f.table.zero()
    for i, a in enumerate(df):
        if not a:
            continue
        for j, b in enumerate(dg):
            if b and comp[i][j]:
                acc = acc + comp[i][j] * a * b
    return acc


def _sharp(comp, alpha: Sequence[RatFunc], zero: RatFunc) -> list[RatFunc]:
    n = len(alpha)
    out = []
    for nu in range(n):
        acc = zero
        for mu in range(n):
            if alpha[mu] and comp[mu][nu]:
                acc = acc + alpha[mu] * comp[mu][nu]
        out.append(acc)
    return out


def _form_bracket(comp, names, a: Sequence[RatFunc], b: Sequence[RatFunc], zero: RatFunc) -> list[RatFunc]:
    # [a, b] = i_{sharp a} db - i_{sharp b} da - d<a, sharp b>
    n = len(names)
    xa, xb = _sharp(comp, a, zero), _sharp(comp, b, zero)
    da = [[a[nu].diff(names[mu]) for nu in range(n)] for mu in range(n)]
    db = [[b[nu].diff(names[mu]) for nu in range(n)] for mu in range(n)]
    pairing = zero
    for mu in range(n):
        if a[mu] and xb[mu]:
            pairing = pairing + a[mu] * xb[mu]
    out = []
    for nu in range(n):
        acc = -pairing.diff(names[nu])
        for mu in range(n):
            if xa[mu]:
                w = db[mu][nu] - db[nu][mu]
                if w:
                    acc = acc + xa[mu] * w
            if xb[mu]:
                w = da[mu][nu] - da[nu][mu]
                if w:
                    acc = acc - xb[mu] * w
        out.append(acc)
    return out


def _jacobiator(comp, names, zero: RatFunc) -> dict[tuple[int, int, int], RatFunc]:
    n = len(names)
    # derivative cache: dP[s][i][j] = d P^{ij} / d z^s
    dP = [[[comp[i][j].diff(names[s]) if comp[i][j] else zero for j in range(n)] for i in range(n)] for s in range(n)]
    out = {}
    for mu, nu, rho in combinations(range(n), 3):
        acc = zero
        for a, b, c in ((mu, nu, rho), (nu, rho, mu), (rho, mu, nu)):
            for s in range(n):
                if comp[a][s] and dP[s][b][c]:
                    acc = acc + comp[a][s] * dP[s][b][c]
        out[(mu, nu, rho)] = acc
    return out


# -- public operations ------------------------------------------------------

def poisson_bracket(P: Bivector, F: RatFunc, G: RatFunc) -> RatFunc:
    return _bracket(P.comp, P.chart.names, F, G)


def jacobiator(P: Bivector) -> dict[tuple[int, int, int], RatFunc]:
    """Cyclic sums ``J^{mu nu rho}`` for ``mu < nu < rho``; all zero iff P is Poisson."""
    return _jacobiator(P.comp, P.chart.names, P.chart.zero())


def is_poisson(P: Bivector) -> bool:
    return all(v.is_zero() for v in jacobiator(P).values())


def differential(chart: Chart, f: RatFunc) -> OneForm:
    return OneForm(chart, tuple(_grad(f, chart.names)))


def coordinate_form(chart: Chart, index: int) -> OneForm:
    """The differential of the ``index``-th chart coordinate."""
    one, zero = chart.table.one(), chart.zero()
    return OneForm(chart, tuple(one if i == index else zero for i in range(chart.dim)))


def sharp(P: Bivector, alpha: OneForm) -> VectorField:
    return VectorField(P.chart, tuple(_sharp(P.comp, alpha.comp, P.chart.zero())))


def hamiltonian_vf(P: Bivector, H: RatFunc) -> VectorField:
    """``X_H = P(dH, .)``; satisfies ``X_H(F) = poisson_bracket(P, H, F)``."""
    return sharp(P, differential(P.chart, H))


def one_form_bracket(P: Bivector, a: OneForm, b: OneForm) -> OneForm:
    return OneForm(P.chart, tuple(_form_bracket(P.comp, P.chart.names, a.comp, b.comp, P.chart.zero())))


def apply_vf(X: VectorField, f: RatFunc) -> RatFunc:
    acc = X.chart.zero()
    for c, n in zip(X.comp, X.chart.names):
        if c:
            d = f.diff(n)
            if d:
                acc = acc + c * d
    return acc


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    return VectorField(X.chart, tuple(apply_vf(X, b) - apply_vf(Y, a) for a, b in zip(X.comp, Y.comp)))


def check_tangency(P: Bivector, c: Chart | None = None) -> bool:
    """True iff every entry in a normal row vanishes on ``y = 0``."""
    c = c or P.chart
    m = c.m
    for a in range(m, c.dim):
        for nu in range(c.dim):
            if P.comp[a][nu] and not c.on_s(P.comp[a][nu]).is_zero():
                return False
    return True


def is_tangent_field(X: VectorField) -> bool:
    return all(X.chart.on_s(c).is_zero() for c in X.normal_part)


def restrict_to_leaf(P: Bivector, c: Chart | None = None) -> tuple[tuple[RatFunc, ...], ...]:
    """The induced structure ``psi^{ij}(x) = P^{ij}(x, 0)`` on S."""
    c = c or P.chart
    if not check_tangency(P, c):
        raise TangencyError("bivector is not tangent to S = {y = 0}")
    return tuple(tuple(c.on_s(P.comp[i][j]) for j in range(c.m)) for i in range(c.m))


def leaf_jacobiator(psi, chart: Chart) -> dict[tuple[int, int, int], RatFunc]:
    return _jacobiator(psi, chart.base, chart.zero())
