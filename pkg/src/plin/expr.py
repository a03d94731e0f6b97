"""Exact multivariate rational functions over Q.

A :class:`RatFunc` is a reduced fraction ``num/den`` of sparse polynomials
living in the polynomial ring of a :class:`VarTable`.  The denominator is
kept monic with respect to the graded-lexicographic order, so two rational
functions are equal exactly when their stored numerators and denominators
are equal.  Polynomial storage, multiplication and gcd are delegated to
sympy's sparse ``PolyRing`` over ``QQ`` (gmpy2-backed rationals).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Sequence, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from plin.errors import NotAUnitError, UnknownVariableError, ZeroDenominatorError

Scalar = Union[int, Fraction]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(names, QQ, grlex)


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _qq(value: Scalar):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


class VarTable:
    """Ordered list of distinct variable names; fixes the exponent-vector layout."""

    __slots__ = ("names", "_index", "ring")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise ValueError(f"invalid identifier {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self.ring = _ring(names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def extend(self, *names: str) -> "VarTable":
        """Return a new table with ``names`` appended (already-present names are skipped)."""
        return VarTable(self.names + tuple(n for n in names if n not in self._index))

    def var(self, name: str) -> "RatFunc":
        i = self.index(name)
        return RatFunc._raw(self, self.ring.gens[i], self.ring.one)

    def const(self, value: Scalar) -> "RatFunc":
        return RatFunc._raw(self, self.ring.ground_new(_qq(value)), self.ring.one)

    def zero(self) -> "RatFunc":
        return RatFunc._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "RatFunc":
        return RatFunc._raw(self, self.ring.one, self.ring.one)

    def from_terms(self, terms: Mapping[tuple, Scalar], den: Mapping[tuple, Scalar] | None = None) -> "RatFunc":
        """Build ``sum c*x^e`` (optionally divided by a second term map)."""
        num = self._poly(terms)
        d = self.ring.one if den is None else self._poly(den)
        return RatFunc._new(self, num, d)

    def _poly(self, terms):
        n = len(self.names)
        out = {}
        for exp, c in terms.items():
            exp = tuple(exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for {n} variables")
            if c:
                out[exp] = _qq(c)
        return self.ring.from_dict(out) if out else self.ring.zero

    def parse(self, text: str) -> "RatFunc":
        from plin.parser import parse_expr

        return parse_expr(text, self)


def _normalize(num, den):
    if not den:
        raise ZeroDenominatorError("division by the zero polynomial")
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if den.is_ground:
        c = den.LC
        return (num if c == 1 else num.quo_ground(c)), ring.one
    num, den = num.cancel(den)
    c = den.LC
    if c != 1:
        num = num.quo_ground(c)
        den = den.quo_ground(c)
    return num, den


class RatFunc:
    """Immutable reduced rational function; the universal scalar of plin."""

    __slots__ = ("table", "num", "den")

    table: VarTable

    @classmethod
    def _raw(cls, table, num, den):
        obj = object.__new__(cls)
        obj.table = table
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def _new(cls, table, num, den):
        num, den = _normalize(num, den)
        return cls._raw(table, num, den)

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.table is not self.table and other.table != self.table:
                raise ValueError(f"variable tables differ: {self.table} vs {other.table}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.table.const(other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            if self.den == 1:
                return RatFunc._raw(self.table, self.num + other.num, self.den)
            return RatFunc._new(self.table, self.num + other.num, self.den)
        return RatFunc._new(self.table, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(self.table, -self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == 1 and other.den == 1:
            return RatFunc._raw(self.table, self.num * other.num, self.den)
        return RatFunc._new(self.table, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDenominatorError("division by the zero polynomial")
        return RatFunc._new(self.table, self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.table.one() / (self**-n)
        return RatFunc._raw(self.table, self.num**n, self.den**n)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.table.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.table == other.table and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.table.names, frozenset(self.num.items()), frozenset(self.den.items())))

    def __bool__(self):
        return bool(self.num)

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den == 1

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num.LC) if self.num else Fraction(0)

    def variables(self) -> set[str]:
        """Names of the variables that actually occur."""
        used = set()
        for p in (self.num, self.den):
            for mon in p.itermonoms():
                used.update(i for i, e in enumerate(mon) if e)
        return {self.table.names[i] for i in used}

    def depends_on(self, names: Iterable[str]) -> bool:
        return not self.variables().isdisjoint(names)

    def num_terms(self) -> dict[tuple, Fraction]:
        return {m: to_fraction(c) for m, c in self.num.terms()}

    def den_terms(self) -> dict[tuple, Fraction]:
        return {m: to_fraction(c) for m, c in self.den.terms()}

    def total_degree(self) -> int:
        """Total degree of the numerator (polynomials only make sense here)."""
        return max((sum(m) for m in self.num.itermonoms()), default=0)

    # -- calculus -----------------------------------------------------
    def diff(self, name: str) -> "RatFunc":
        i = self.table.index(name)
        x = self.table.ring.gens[i]
        dn = self.num.diff(x)
        if self.den == 1:
            return RatFunc._raw(self.table, dn, self.den)
        dd = self.den.diff(x)
        if not dd:
            return RatFunc._new(self.table, dn, self.den)
        return RatFunc._new(self.table, dn * self.den - self.num * dd, self.den**2)

    def subs(self, assignments: Mapping[str, "RatFunc | Scalar"]) -> "RatFunc":
        """Simultaneous substitution of variables by rational functions."""
        if not assignments:
            return self
        table, ring = self.table, self.table.ring
        vals = {}
        for name, v in assignments.items():
            vals[table.index(name)] = v if isinstance(v, RatFunc) else table.const(v)
            if vals[table.index(name)].table != table:
                raise ValueError("substituted value lives in a different variable table")
        if all(v.is_constant() for v in vals.values()):
            point = {i: v.constant_value() for i, v in vals.items()}
            num, den = _eval_at_constants(self.num, point), _eval_at_constants(self.den, point)
        elif all(v.den == 1 for v in vals.values()):
            pairs = [(ring.gens[i], v.num) for i, v in vals.items()]
            num, den = self.num.compose(pairs), self.den.compose(pairs)
        else:
            num, den = _eval_homogenized(self.num, self.den, vals)
        if not den:
            raise ZeroDenominatorError(f"denominator vanishes after substitution in {self}")
        return RatFunc._new(table, num, den)

    def restrict(self, names: Iterable[str]) -> "RatFunc":
        """Set the given variables to zero."""
        return self.subs({n: 0 for n in names})

    def series_coeff(self, names: Sequence[str], multidegree: Sequence[int]) -> "RatFunc":
        """Taylor coefficient of ``prod names[i]**multidegree[i]`` at ``names = 0``."""
        if len(names) != len(multidegree):
            raise ValueError("names and multidegree differ in length")
        idx = [self.table.index(n) for n in names]
        at_zero = {n: 0 for n in names}
        den0 = _eval_at_constants(self.den, {i: Fraction(0) for i in idx})
        if not den0:
            raise NotAUnitError(f"denominator of {self} vanishes at {', '.join(names)} = 0")
        if all(mon[i] == 0 for mon in self.den.itermonoms() for i in idx):
            # den is free of the expansion variables: read the numerator directly
            picked = {}
            for mon, c in self.num.terms():
                if all(mon[i] == d for i, d in zip(idx, multidegree)):
                    m = list(mon)
                    for i in idx:
                        m[i] = 0
                    picked[tuple(m)] = c
            num = self.table.ring.from_dict(picked) if picked else self.table.ring.zero
            return RatFunc._new(self.table, num, self.den)
        g = self
        scale = 1
        for n, d in zip(names, multidegree):
            for _ in range(d):
                g = g.diff(n)
            scale *= factorial(d)
        return g.subs(at_zero) / scale

    def to_table(self, table: VarTable) -> "RatFunc":
        """Re-express in another table; every occurring variable must exist there."""
        if table == self.table:
            return self if table is self.table else RatFunc._raw(table, self.num.set_ring(table.ring), self.den.set_ring(table.ring))
        pos = [table.index(n) if n in table else None for n in self.table.names]
        size = len(table)

        def remap(p):
            out = {}
            for mon, c in p.terms():
                m = [0] * size
                for i, e in enumerate(mon):
                    if e:
                        if pos[i] is None:
                            raise UnknownVariableError(
                                f"variable {self.table.names[i]!r} does not exist in {table}")
                        m[pos[i]] = e
                out[tuple(m)] = c
            return table.ring.from_dict(out) if out else table.ring.zero

        return RatFunc._raw(table, remap(self.num), remap(self.den))

    # -- printing -----------------------------------------------------
    def __str__(self):
        if self.den == 1:
            return _format_poly(self.num, self.table.names)
        return f"({_format_poly(self.num, self.table.names)})/({_format_poly(self.den, self.table.names)})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _eval_at_constants(p, point: Mapping[int, Fraction]):
    ring = p.ring
    out = {}
    for mon, c in p.terms():
        m = list(mon)
        for i, v in point.items():
            e = m[i]
            if e:
                if not v:
                    c = None
                    break
                c = c * _qq(v**e)
                m[i] = 0
        if c is None:
            continue
        key = tuple(m)
        out[key] = out.get(key, QQ(0)) + c
    out = {k: v for k, v in out.items() if v}
    return ring.from_dict(out) if out else ring.zero


def _eval_homogenized(num, den, vals):
    # x_i -> a_i/b_i: multiply numerator and denominator by prod b_i^D_i, D_i the
    # largest exponent of x_i in either, so both stay polynomial.
    ring = num.ring
    degs = {}
    for i in vals:
        degs[i] = max(num.degree(i) if num else 0, den.degree(i), 0)
    apow = {i: [ring.one] for i in vals}
    bpow = {i: [ring.one] for i in vals}
    for i, v in vals.items():
        for _ in range(degs[i]):
            apow[i].append(apow[i][-1] * v.num)
            bpow[i].append(bpow[i][-1] * v.den)

    def ev(p):
        acc = ring.zero
        for mon, c in p.terms():
            m = list(mon)
            t = ring.one.mul_ground(c)
            for i in vals:
                e = m[i]
                m[i] = 0
                t = t * apow[i][e] * bpow[i][degs[i] - e]
            acc += t * ring.from_dict({tuple(m): QQ(1)})
        return acc

    return ev(num), ev(den)


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_poly(p, names) -> str:
    if not p:
        return "0"
    parts = []
    for k, (mon, c) in enumerate(p.terms()):
        c = to_fraction(c)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mon) if e]
        if not factors:
            body = _format_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(a) + "*" + "*".join(factors)
        if k == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


# -- functional API ---------------------------------------------------------

def parse_expr(text: str, vars: VarTable) -> RatFunc:
    from plin.parser import parse_expr as _parse

    return _parse(text, vars)


def differentiate(f: RatFunc, var: str) -> RatFunc:
    return f.diff(var)


def substitute(f: RatFunc, assignments: Mapping[str, RatFunc | Scalar]) -> RatFunc:
    return f.subs(assignments)


def is_zero(f: RatFunc) -> bool:
    return f.is_zero()


def series_coeff(f: RatFunc, vars: Sequence[str], multidegree: Sequence[int]) -> RatFunc:
    return f.series_coeff(vars, multidegree)
