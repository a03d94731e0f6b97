from __future__ import annotations

import random

import pytest

from plin.expr import RatFunc
from plin.infinitesimal import AffFunc
from plin.models import builtin
from plin.poisson import Chart, VectorField


def random_poly(chart: Chart, rng: random.Random, degree: int = 3, names=None, terms: int = 4, coeff: int = 3) -> RatFunc:
    """Sparse polynomial with integer coefficients in [-coeff, coeff]."""
    names = list(chart.names if names is None else names)
    acc = chart.zero()
    for _ in range(terms):
        mono = chart.table.const(rng.randint(-coeff, coeff))
        for _ in range(rng.randint(0, degree)):
            if names:
                mono = mono * chart.var(rng.choice(names))
        acc = acc + mono
    return acc


def random_aff(chart: Chart, rng: random.Random, degree: int = 2) -> AffFunc:
    f = random_poly(chart, rng, degree, chart.base)
    eta = [random_poly(chart, rng, degree, chart.base, terms=2) for _ in chart.normal]
    return AffFunc(chart, f, eta)


def random_tangent_field(chart: Chart, rng: random.Random, degree: int = 2) -> VectorField:
    comps = [random_poly(chart, rng, degree) for _ in chart.base]
    for _ in chart.normal:
        # every term carries at least one normal coordinate
        acc = chart.zero()
        for b in chart.normal:
            acc = acc + chart.var(b) * random_poly(chart, rng, degree - 1, terms=2)
        comps.append(acc)
    return VectorField(chart, comps)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(params=["MODEL-ZERO", "MODEL-SO3", "MODEL-E3", "MODEL-CPL"])
def any_model(request):
    return builtin(request.param)


@pytest.fixture
def e3():
    return builtin("e3")


@pytest.fixture
def cpl():
    return builtin("cpl")
