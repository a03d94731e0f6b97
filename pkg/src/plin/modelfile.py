"""Line-oriented model files.

    # comments start with '#'
    [chart]
    base = x1, x2
    normal = y
    [poisson]
    1,2 = 1 + y          # 1-based, mu < nu
    [hamiltonian]
    H = x2
    [delta]
    1,1 = x1             # i, a (1-based)
    [mu]
    1,1 = -x1
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from plin.errors import ExprError, PlinError
from plin.expr import RatFunc
from plin.models import Model, builtin
from plin.poisson import Bivector, Chart

SECTIONS = ("chart", "poisson", "hamiltonian", "delta", "mu")


class ModelFileError(PlinError):
    def __init__(self, message: str, line: int, col: int = 1, source: str = "<model>"):
        self.line = line
        self.col = col
        self.source = source
        self.message = message
        super().__init__(f"{source}:{line}:{col}: {message}")


@dataclass
class ModelFile:
    base: tuple[str, ...]
    normal: tuple[str, ...]
    poisson: dict[tuple[int, int], str] = field(default_factory=dict)
    hamiltonian: str | None = None
    delta: dict[tuple[int, int], str] = field(default_factory=dict)
    mu: dict[tuple[int, int], str] = field(default_factory=dict)
    name: str = "model"

    @property
    def chart(self) -> Chart:
        return Chart(self.base, self.normal)

    def to_model(self) -> Model:
        c = self.chart
        biv = Bivector.from_upper(c, {(i - 1, j - 1): c.parse(e) for (i, j), e in self.poisson.items()})
        delta = {(i - 1, a - 1): c.parse(e) for (i, a), e in self.delta.items()}
        mu = {(i - 1, a - 1): c.parse(e) for (i, a), e in self.mu.items()}
        return Model(self.name, biv, self.hamiltonian, delta, mu)


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def _names(value: str, lineno: int, col: int, source: str) -> tuple[str, ...]:
    if not value.strip():
        return ()
    out = []
    for part in value.split(","):
        name = part.strip()
        if not name.isidentifier():
            raise ModelFileError(f"invalid coordinate name {name!r}", lineno, col, source)
        out.append(name)
    return tuple(out)


def _index_pair(key: str, lineno: int, source: str) -> tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2:
        raise ModelFileError(f"expected an index pair 'i,j', got {key.strip()!r}", lineno, 1, source)
    try:
        i, j = (int(p) for p in parts)
    except ValueError:
        raise ModelFileError(f"indices must be integers: {key.strip()!r}", lineno, 1, source) from None
    return i, j


def parse_model_text(text: str, source: str = "<model>") -> ModelFile:
    section = None
    raw: dict[str, list[tuple[int, str, str, int]]] = {s: [] for s in SECTIONS}
    chart_keys: dict[str, tuple[int, str, int]] = {}
    for lineno, full in enumerate(text.splitlines(), start=1):
        line = _strip_comment(full)
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ModelFileError("unterminated section header", lineno, line.index("[") + 1, source)
            name = stripped[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ModelFileError(f"unknown section [{name}]", lineno, line.index("[") + 1, source)
            section = name
            continue
        if "=" not in line:
            raise ModelFileError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1, source)
        if section is None:
            raise ModelFileError("entry outside of any section", lineno, 1, source)
        key, value = line.split("=", 1)
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        if section == "chart":
            k = key.strip().lower()
            if k not in ("base", "normal"):
                raise ModelFileError(f"unknown chart key {key.strip()!r}", lineno, 1, source)
            if k in chart_keys:
                raise ModelFileError(f"duplicate chart key {k!r}", lineno, 1, source)
            chart_keys[k] = (lineno, value, vcol)
        else:
            raw[section].append((lineno, key, value.strip(), vcol))

    if "base" not in chart_keys and "normal" not in chart_keys:
        raise ModelFileError("missing [chart] section", 1, 1, source)
    base = _names(chart_keys["base"][1], chart_keys["base"][0], chart_keys["base"][2], source) if "base" in chart_keys else ()
    normal = _names(chart_keys["normal"][1], chart_keys["normal"][0], chart_keys["normal"][2], source) if "normal" in chart_keys else ()
    try:
        chart = Chart(base, normal)
    except ValueError as exc:
        raise ModelFileError(str(exc), min(v[0] for v in chart_keys.values()), 1, source) from None

    def check_expr(expr: str, lineno: int, col: int):
        if not expr:
            raise ModelFileError("empty expression", lineno, col, source)
        try:
            chart.parse(expr)
        except ExprError as exc:
            raise ModelFileError(exc.msg, lineno, col + (exc.pos or 0), source) from None

    mf = ModelFile(base, normal)
    n = chart.dim
    for lineno, key, value, vcol in raw["poisson"]:
        i, j = _index_pair(key, lineno, source)
        if not 1 <= i < j <= n:
            raise ModelFileError(f"poisson entry {i},{j} must satisfy 1 <= mu < nu <= {n}", lineno, 1, source)
        if (i, j) in mf.poisson:
            raise ModelFileError(f"duplicate poisson entry {i},{j}", lineno, 1, source)
        check_expr(value, lineno, vcol)
        mf.poisson[(i, j)] = value
    for lineno, key, value, vcol in raw["hamiltonian"]:
        if key.strip() != "H":
            raise ModelFileError("the hamiltonian section takes a single 'H = <expr>'", lineno, 1, source)
        if mf.hamiltonian is not None:
            raise ModelFileError("duplicate hamiltonian", lineno, 1, source)
        check_expr(value, lineno, vcol)
        mf.hamiltonian = value
    for sec in ("delta", "mu"):
        target = getattr(mf, sec)
        for lineno, key, value, vcol in raw[sec]:
            i, a = _index_pair(key, lineno, source)
            if not (1 <= i <= chart.m and 1 <= a <= chart.k):
                raise ModelFileError(f"{sec} entry {i},{a} out of range (1..{chart.m}, 1..{chart.k})", lineno, 1, source)
            if (i, a) in target:
                raise ModelFileError(f"duplicate {sec} entry {i},{a}", lineno, 1, source)
            check_expr(value, lineno, vcol)
            if chart.parse(value).depends_on(chart.normal):
                raise ModelFileError(f"{sec} entries must not depend on the normal coordinates", lineno, vcol, source)
            target[(i, a)] = value
    return mf


def load_model(path: str | Path) -> ModelFile:
    p = Path(path)
    mf = parse_model_text(p.read_text(), source=str(p))
    mf.name = p.stem
    return mf


def parse_matrix_section(text: str, chart: Chart, section: str, source: str = "<matrix>") -> dict[tuple[int, int], RatFunc]:
    """Read a stand-alone ``[delta]`` or ``[mu]`` file against a known chart; returns 0-based entries."""
    names = ", ".join(chart.base)
    normal = ", ".join(chart.normal)
    header = f"[chart]\nbase = {names}\nnormal = {normal}\n"
    # keep line numbers of the user's file: put the header on a virtual line 0 by offsetting
    try:
        mf = parse_model_text(header + text, source=source)
    except ModelFileError as exc:
        raise ModelFileError(exc.message, max(exc.line - 3, 1), exc.col, source) from None
    entries = getattr(mf, section)
    if any(getattr(mf, other) for other in ("delta", "mu") if other != section):
        raise ModelFileError(f"expected a [{section}] section", 1, 1, source)
    return {(i - 1, a - 1): chart.parse(e) for (i, a), e in entries.items()}


def model_from_builtin(name: str) -> ModelFile:
    return export_model(builtin(name))


def export_model(model: Model, hamiltonian: str | None = None) -> ModelFile:
    """Canonical model-file data; re-ingesting ``format_model`` of it yields the same data."""
    c = model.chart
    mf = ModelFile(c.base, c.normal, name=model.name)
    for i in range(c.dim):
        for j in range(i + 1, c.dim):
            f = model.bivector.comp[i][j]
            if f:
                mf.poisson[(i + 1, j + 1)] = str(f)
    h = hamiltonian if hamiltonian is not None else model.hamiltonian
    if h is not None:
        mf.hamiltonian = str(c.parse(h)) if isinstance(h, str) else str(h)
    for sec in ("delta", "mu"):
        for (i, a), f in sorted(getattr(model, sec).items()):
            if f:
                getattr(mf, sec)[(i + 1, a + 1)] = str(f)
    return mf


def format_model(mf: ModelFile) -> str:
    lines = ["[chart]", f"base = {','.join(mf.base)}", f"normal = {','.join(mf.normal)}", "[poisson]"]
    lines += [f"{i},{j} = {e}" for (i, j), e in sorted(mf.poisson.items())]
    if mf.hamiltonian is not None:
        lines += ["[hamiltonian]", f"H = {mf.hamiltonian}"]
    for sec in ("delta", "mu"):
        entries = getattr(mf, sec)
        if entries:
            lines.append(f"[{sec}]")
            lines += [f"{i},{a} = {e}" for (i, a), e in sorted(entries.items())]
    return "\n".join(lines) + "\n"
