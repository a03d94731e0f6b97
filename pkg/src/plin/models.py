"""Built-in model battery."""
from __future__ import annotations

from dataclasses import dataclass, field

from plin.poisson import Bivector, Chart


def levi_civita(i: int, j: int, k: int) -> int:
    """Sign of the permutation (i, j, k) of (0, 1, 2); zero on repeated indices."""
    if len({i, j, k}) < 3:
        return 0
    return 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


@dataclass(frozen=True)
class Model:
    name: str
    bivector: Bivector
    hamiltonian: str | None = None
    delta: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.bivector.chart


def _zero() -> Model:
    chart = Chart(("x1", "x2"), ("y1",))
    return Model("MODEL-ZERO", Bivector.zero(chart))


def _so3() -> Model:
    chart = Chart((), ("y1", "y2", "y3"))
    y = [chart.var(n) for n in chart.normal]
    entries = {}
    for a in range(3):
        for b in range(a + 1, 3):
            entries[(a, b)] = sum((levi_civita(a, b, c) * y[c] for c in range(3)), chart.zero())
    return Model("MODEL-SO3", Bivector.from_upper(chart, entries))


def _e3() -> Model:
    chart = Chart(("w1", "w2", "w3"), ("z1", "z2", "z3"))
    w = [chart.var(n) for n in chart.base]
    z = [chart.var(n) for n in chart.normal]
    entries = {}
    for i in range(3):
        for j in range(i + 1, 3):
            entries[(i, j)] = sum((levi_civita(i, j, k) * w[k] for k in range(3)), chart.zero())
        for a in range(3):
            entries[(i, 3 + a)] = sum((levi_civita(i, a, k) * z[k] for k in range(3)), chart.zero())
    return Model("MODEL-E3", Bivector.from_upper(chart, entries))


def _cpl() -> Model:
    chart = Chart(("x1", "x2"), ("y",))
    return Model("MODEL-CPL", Bivector.from_upper(chart, {(0, 1): "1 + y"}))


_BUILDERS = {"MODEL-ZERO": _zero, "MODEL-SO3": _so3, "MODEL-E3": _e3, "MODEL-CPL": _cpl}

BUILTIN_NAMES = tuple(_BUILDERS)


def builtin(name: str) -> Model:
    key = name.upper()
    if not key.startswith("MODEL-"):
        key = "MODEL-" + key
    try:
        return _BUILDERS[key]()
    except KeyError:
        raise KeyError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
