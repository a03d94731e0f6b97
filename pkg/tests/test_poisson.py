from __future__ import annotations

import random

import pytest

from conftest import random_poly
from plin.models import builtin, levi_civita
from plin.poisson import (
    Bivector,
    Chart,
    check_tangency,
    coordinate_form,
    differential,
    hamiltonian_vf,
    is_poisson,
    jacobiator,
    leaf_jacobiator,
    lie_bracket,
    one_form_bracket,
    poisson_bracket,
    restrict_to_leaf,
)
from plin.errors import TangencyError


def test_bracket_examples(e3, cpl):
    c = e3.chart
    assert poisson_bracket(e3.bivector, c.var("w1"), c.var("w2")) == c.var("w3")
    z = builtin("zero")
    assert poisson_bracket(z.bivector, z.chart.var("x1"), z.chart.var("x2")).is_zero()
    assert poisson_bracket(cpl.bivector, cpl.chart.var("x2"), cpl.chart.var("x1")) == cpl.chart.parse("-(1+y)")


def test_jacobiator(any_model):
    assert is_poisson(any_model.bivector)


def test_jacobiator_detects_failure(cpl):
    c = cpl.chart
    bad = Bivector.from_upper(c, {(0, 1): "1 + x1*y", (0, 2): "y"})
    jac = jacobiator(bad)
    assert any(jac.values())
    # brute force: cyclic sum of coordinate brackets
    x1, x2, y = (c.var(n) for n in c.names)
    br = lambda f, g: poisson_bracket(bad, f, g)
    assert br(x1, br(x2, y)) + br(x2, br(y, x1)) + br(y, br(x1, x2)) == jac[(0, 1, 2)]


def test_antisymmetry_enforced():
    c = Chart(("x",), ("y",))
    one = c.table.one()
    with pytest.raises(ValueError):
        Bivector(c, ((c.zero(), one), (one, c.zero())))


def test_hamiltonian_vf(cpl, e3):
    c = cpl.chart
    X = hamiltonian_vf(cpl.bivector, c.var("x1"))
    assert X.comp == (c.zero(), c.parse("1 + y"), c.zero())
    assert hamiltonian_vf(cpl.bivector, c.table.one()).is_zero()
    c = e3.chart
    X = hamiltonian_vf(e3.bivector, c.parse("1/2*(w1^2+w2^2+w3^2)"))
    assert all(f.is_zero() for f in X.base_part)
    for a in range(3):
        expected = sum((-levi_civita(a, i, k) * c.var(f"w{i+1}") * c.var(f"z{k+1}") for i in range(3) for k in range(3)), c.zero())
        assert X.normal_part[a] == expected


def test_hamiltonian_vf_is_bracket(e3, rng):
    c = e3.chart
    for _ in range(5):
        H, F = random_poly(c, rng), random_poly(c, rng)
        assert hamiltonian_vf(e3.bivector, H)(F) == poisson_bracket(e3.bivector, H, F)


def test_one_form_bracket(cpl, e3):
    c = cpl.chart
    assert one_form_bracket(cpl.bivector, coordinate_form(c, 0), coordinate_form(c, 1)) == coordinate_form(c, 2)
    c = e3.chart
    assert one_form_bracket(e3.bivector, coordinate_form(c, 0), coordinate_form(c, 1)) == coordinate_form(c, 2)
    dF = differential(c, c.parse("w1*z2 + z3^2"))
    assert one_form_bracket(e3.bivector, dF, dF).is_zero()


def test_tangency(e3):
    so3 = builtin("so3")
    assert check_tangency(e3.bivector)
    assert check_tangency(so3.bivector)
    c = Chart(("x1", "x2"), ("y",))
    bad = Bivector.from_upper(c, {(0, 1): "1 + y", (0, 2): "1"})
    assert not check_tangency(bad)
    with pytest.raises(TangencyError):
        restrict_to_leaf(bad)


def test_restrict_to_leaf(e3, cpl):
    c = e3.chart
    psi = restrict_to_leaf(e3.bivector)
    for i in range(3):
        for j in range(3):
            assert psi[i][j] == sum((levi_civita(i, j, k) * c.var(f"w{k+1}") for k in range(3)), c.zero())
    assert restrict_to_leaf(builtin("zero").bivector) == ((builtin("zero").chart.zero(),) * 2,) * 2
    one = cpl.chart.table.one()
    assert restrict_to_leaf(cpl.bivector) == ((cpl.chart.zero(), one), (-one, cpl.chart.zero()))


@pytest.mark.parametrize("name", ["MODEL-E3", "MODEL-CPL"])
def test_bracket_properties(name):
    model = builtin(name)
    P, c = model.bivector, model.chart
    rng = random.Random(11)
    br = lambda f, g: poisson_bracket(P, f, g)
    for _ in range(6):
        F, G, H = (random_poly(c, rng, 2) for _ in range(3))
        assert br(F, G) == -br(G, F)
        assert br(F, G * H) == br(F, G) * H + G * br(F, H)
        assert (br(F, br(G, H)) + br(G, br(H, F)) + br(H, br(F, G))).is_zero()
        assert one_form_bracket(P, differential(c, F), differential(c, G)) == differential(c, br(F, G))
        # Hamiltonian fields are tangent to S and form a Lie algebra morphism
        X = hamiltonian_vf(P, H)
        assert all(c.on_s(f).is_zero() for f in X.normal_part)
        assert lie_bracket(hamiltonian_vf(P, F), hamiltonian_vf(P, G)) == hamiltonian_vf(P, br(F, G))
    psi = restrict_to_leaf(P)
    assert not any(leaf_jacobiator(psi, c).values())
