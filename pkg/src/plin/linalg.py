"""Exact dense linear algebra over Q and over the rational-function field."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from plin.errors import SingularError
from plin.expr import RatFunc, VarTable

Matrix = tuple[tuple[RatFunc, ...], ...]


def identity(table: VarTable, n: int) -> Matrix:
    one, zero = table.one(), table.zero()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def matmul(a: Sequence[Sequence[RatFunc]], b: Sequence[Sequence[RatFunc]], table: VarTable) -> Matrix:
    rows, inner = len(a), len(b)
    cols = len(b[0]) if inner else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = table.zero()
            for k in range(inner):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def transpose(a: Sequence[Sequence[RatFunc]]) -> Matrix:
    return tuple(zip(*a)) if a else ()


def det(a: Sequence[Sequence[RatFunc]], table: VarTable) -> RatFunc:
    """Determinant by Gaussian elimination over the field of fractions."""
    n = len(a)
    m = [list(r) for r in a]
    result = table.one()
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return table.zero()
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result = result * piv
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / piv
                m[r] = [x - f * y if y else x for x, y in zip(m[r], m[c])]
    return result


def inverse(a: Sequence[Sequence[RatFunc]], table: VarTable) -> Matrix:
    """Gauss-Jordan inverse; raises :class:`SingularError` when det is the zero function."""
    n = len(a)
    one, zero = table.one(), table.zero()
    m = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            raise SingularError("matrix is singular over the rational-function field")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        if piv != one:
            m[c] = [x / piv if x else x for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y if y else x for x, y in zip(m[r], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def solve_rational(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve ``a x = b`` over Q by fraction-free (Bareiss) elimination.

    Returns the solution whose free unknowns are zero, with pivots taken at
    the leftmost possible column, or ``None`` when the system is inconsistent.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    # clear denominators row by row so the elimination runs over Z
    m = []
    for r in range(rows):
        entries = list(a[r]) + [b[r]]
        lcm = 1
        for e in entries:
            d = Fraction(e).denominator
            lcm = lcm * d // gcd(lcm, d)
        m.append([int(Fraction(e) * lcm) for e in entries])

    pivots = []
    prev = 1
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, rows):
            m[i] = [(m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev for j in range(cols + 1)]
        prev = m[r][c]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if m[i][cols]:
            return None
    x = [Fraction(0)] * cols
    for i in reversed(range(r)):
        c = pivots[i]
        s = Fraction(m[i][cols]) - sum(m[i][j] * x[j] for j in range(c + 1, cols) if m[i][j])
        x[c] = s / m[i][c]
    return x

