from __future__ import annotations

import random
from fractions import Fraction

import pytest

from plin.errors import SingularError
from plin.expr import VarTable
from plin.linalg import det, identity, inverse, matmul, solve_rational, transpose

V = VarTable(["x", "y"])


def _gauss_jordan(a, b):
    """Plain reduced row echelon form over Fraction, free unknowns zero."""
    rows, cols = len(a), len(a[0])
    m = [[Fraction(v) for v in r] + [Fraction(bb)] for r, bb in zip(a, b)]
    piv, r = [], 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        m[r] = [v / m[r][c] for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [u - f * v for u, v in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    if any(m[i][cols] for i in range(r, rows)):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = m[i][cols]
    return x


def test_solve_against_gauss_jordan():
    rng = random.Random(7)
    for _ in range(300):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        a = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rows)]
        if rng.random() < 0.3 and rows > 1:
            a[-1] = [2 * v for v in a[0]]
        b = [Fraction(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(rows)]
        assert solve_rational(a, b) == _gauss_jordan(a, b)


def test_solve_inconsistent():
    assert solve_rational([[1, 1], [2, 2]], [1, 3]) is None


def test_inverse_and_det():
    a = ((V.parse("1 + y"), V.parse("x")), (V.zero(), V.parse("2")))
    inv = inverse(a, V)
    assert matmul(a, inv, V) == identity(V, 2)
    assert det(a, V) == V.parse("2 + 2*y")
    assert transpose(transpose(a)) == a


def test_singular():
    a = ((V.var("x"), V.var("y")), (V.var("x") * 2, V.var("y") * 2))
    assert det(a, V).is_zero()
    with pytest.raises(SingularError):
        inverse(a, V)
