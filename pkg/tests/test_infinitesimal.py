from __future__ import annotations

import random
from itertools import product

import pytest

from conftest import random_aff, random_poly
from plin.errors import NotAUnitError, NotPoissonError
from plin.infinitesimal import (
    AffFunc,
    InfTriple,
    aff_bracket,
    aff_mul,
    aff_of,
    check_triple_axioms,
    extract_triple,
    extract_triple_via_algebroid,
    first_order_homomorphism_residual,
)
from plin.models import builtin, levi_civita


def _eps_psi(c):
    return [[sum((levi_civita(i, j, k) * c.var(f"w{k+1}") for k in range(3)), c.zero()) for j in range(3)] for i in range(3)]


def test_e3_triple(e3):
    c = e3.chart
    T = extract_triple(e3.bivector)
    assert T.psi == tuple(tuple(r) for r in _eps_psi(c))
    for i, a, b in product(range(3), repeat=3):
        assert T.dcon[i][a][b] == c.table.const(levi_civita(i, a, b))
        assert T.lam[i][a][b].is_zero()
    assert all(f.is_zero() for r in T.kform for e in r for f in e)


def test_so3_and_cpl_triples(cpl):
    so3 = builtin("so3")
    T = extract_triple(so3.bivector)
    assert T.psi == () and T.dcon == () and T.kform == ()
    for a, b, cc in product(range(3), repeat=3):
        assert T.lam[a][b][cc] == so3.chart.table.const(levi_civita(a, b, cc))
    T = extract_triple(cpl.bivector)
    one = cpl.chart.table.one()
    assert T.psi[0][1] == one and T.kform[0][1][0] == one and T.kform[1][0][0] == -one
    assert all(f.is_zero() for r in T.dcon for e in r for f in e)


def test_two_routes(any_model):
    assert extract_triple(any_model.bivector) == extract_triple_via_algebroid(any_model.bivector)


def test_axioms(any_model):
    report = check_triple_axioms(extract_triple(any_model.bivector))
    assert report.ok, report.nonzero()


def test_axioms_reject_non_poisson_leaf(e3):
    T = extract_triple(e3.bivector)
    c = e3.chart
    psi = [list(r) for r in T.psi]
    psi[0][1], psi[1][0] = c.parse("w3*w1"), c.parse("-w3*w1")
    psi[0][2], psi[2][0] = c.parse("w2"), c.parse("-w2")
    with pytest.raises(NotPoissonError):
        check_triple_axioms(T.replace(psi=psi))


def test_broken_dcon_breaks_homomorphism(e3):
    T = extract_triple(e3.bivector)
    c = e3.chart
    zero3 = ((c.zero(),) * 3,) * 3
    broken = T.replace(dcon=(zero3,) * 3)
    res = first_order_homomorphism_residual(e3.bivector, c.var("w1"), c.var("z2"), broken)
    assert not res.is_zero()


def test_aff_mul():
    c = builtin("cpl").chart
    f, g = c.parse("x1"), c.parse("x2 + 1")
    e1, e2 = AffFunc.linear(c, [c.parse("x1")]), AffFunc.linear(c, [c.parse("2")])
    assert aff_mul(AffFunc.base(c, f), AffFunc.base(c, g)) == AffFunc.base(c, f * g)
    assert aff_mul(e1, e2).is_zero()
    p = AffFunc(c, f, [g])
    assert aff_mul(AffFunc.base(c, c.table.one()), p) == p


def test_aff_bracket_examples(e3, cpl):
    T = extract_triple(e3.bivector)
    c = e3.chart
    res = aff_bracket(T, AffFunc.generator(c, "w1"), AffFunc.generator(c, "z2"))
    assert res == AffFunc.generator(c, "z3")
    T = extract_triple(cpl.bivector)
    c = cpl.chart
    one = c.table.one()
    assert aff_bracket(T, AffFunc.generator(c, "x1"), AffFunc.generator(c, "x2")) == AffFunc(c, one, [one])
    phi = AffFunc(c, c.parse("x1*x2"), [c.parse("x1")])
    assert aff_bracket(T, phi, phi).is_zero()


def test_aff_of(cpl):
    c = builtin("zero").chart
    a = aff_of(c.parse("x1 + x2*y1 + y1^2"), c)
    assert a.f == c.parse("x1") and a.eta == (c.parse("x2"),)
    assert aff_of(c.parse("x1^2"), c) == AffFunc.base(c, c.parse("x1^2"))
    one = c.table.one()
    assert aff_of(c.parse("1/(1-y1)"), c) == AffFunc(c, one, [one])
    with pytest.raises(NotAUnitError):
        aff_of(c.parse("1/y1"), c)


def test_homomorphism_examples(e3, cpl):
    c = e3.chart
    assert first_order_homomorphism_residual(e3.bivector, c.parse("w1*z2"), c.parse("w3")).is_zero()
    F = c.parse("w1*z1 + z2^2")
    assert first_order_homomorphism_residual(e3.bivector, F, F).is_zero()
    c = cpl.chart
    assert first_order_homomorphism_residual(cpl.bivector, c.var("x1"), c.var("x2")).is_zero()


@pytest.mark.parametrize("name", ["MODEL-E3", "MODEL-CPL", "MODEL-SO3"])
def test_affine_algebra_is_poisson(name):
    model = builtin(name)
    c = model.chart
    T = extract_triple(model.bivector)
    rng = random.Random(5)
    gens = [AffFunc.generator(c, n) for n in c.names]
    samples = gens + [random_aff(c, rng) for _ in range(4)]
    br = lambda p, q: aff_bracket(T, p, q)
    for p, q, r in product(samples[:5], repeat=3):
        assert (br(p, br(q, r)) + br(q, br(r, p)) + br(r, br(p, q))).is_zero()
    for p, q, r in zip(samples, samples[1:], samples[2:]):
        assert br(p, aff_mul(q, r)) == aff_mul(br(p, q), r) + aff_mul(q, br(p, r))
        # the base part is the leaf bracket; two linear functions have no base part
        assert br(p, q).f == br(AffFunc.base(c, p.f), AffFunc.base(c, q.f)).f
        assert br(AffFunc.linear(c, p.eta), AffFunc.linear(c, q.eta)).f.is_zero()


def test_poisson_module_case(e3):
    # lam = 0 and K = 0: the bracket is ({f1, f2}, D_df1 eta2 - D_df2 eta1)
    T = extract_triple(e3.bivector)
    c = e3.chart
    from plin.infinitesimal import base_bracket, base_differential, cov

    rng = random.Random(9)
    for _ in range(5):
        p, q = random_aff(c, rng), random_aff(c, rng)
        lin = tuple(a - b for a, b in zip(cov(T, base_differential(T, p.f), q.eta), cov(T, base_differential(T, q.f), p.eta)))
        assert aff_bracket(T, p, q) == AffFunc(c, base_bracket(T, p.f, q.f), lin)


@pytest.mark.parametrize("name", ["MODEL-E3", "MODEL-CPL"])
def test_homomorphism_random(name):
    model = builtin(name)
    rng = random.Random(13)
    for _ in range(8):
        F, G = random_poly(model.chart, rng), random_poly(model.chart, rng)
        assert first_order_homomorphism_residual(model.bivector, F, G).is_zero()


def test_triple_validation(cpl):
    T = extract_triple(cpl.bivector)
    c = cpl.chart
    with pytest.raises(ValueError):
        T.replace(psi=((c.zero(), c.var("y")), (-c.var("y"), c.zero())))
    with pytest.raises(ValueError):
        InfTriple(c, T.psi, T.lam, T.dcon, ())
