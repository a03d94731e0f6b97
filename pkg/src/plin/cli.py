"""Command-line front end: ``plin <command> (--model PATH | --builtin NAME) [options]``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable

from plin.coupling import (
    coupling_form,
    coupling_tensor,
    first_order_match_residual,
    leaf_geometry,
    var_hamiltonian_residual,
)
from plin.errors import PlinError, SingularError
from plin.hamiltonize import (
    MuMorphism,
    TransChange,
    affine_hamiltonian,
    chart_realize,
    ham_residual,
    hamiltonization_check,
    iso_check,
    mu_residual,
    solve_mu,
    transform_triple,
)
from plin.infinitesimal import (
    AffFunc,
    InfTriple,
    check_triple_axioms,
    extract_triple,
    extract_triple_via_algebroid,
)
from plin.linearize import rescale_pullback, torsion, variation
from plin.modelfile import ModelFile, export_model, format_model, load_model, parse_matrix_section
from plin.models import BUILTIN_NAMES, Model, builtin
from plin.poisson import Bivector, check_tangency, hamiltonian_vf, is_poisson, jacobiator

COMMANDS = (
    "check-poisson", "tangency", "extract", "axioms", "linearize", "torsion",
    "hamiltonize", "transform", "solve-mu", "coupling", "all",
)


class UsageError(PlinError):
    pass


# -- serialization ----------------------------------------------------------

def _key(idx) -> str:
    return ",".join(str(i + 1) for i in idx)


def _dump(arr, prefix=()) -> dict[str, str]:
    """Nonzero entries of a nested array keyed by 1-based comma-joined indices."""
    out = {}
    if hasattr(arr, "is_zero"):
        if not arr.is_zero():
            out[_key(prefix)] = str(arr)
        return out
    for i, sub in enumerate(arr):
        out.update(_dump(sub, prefix + (i,)))
    return out


def _dump_triple(T: InfTriple) -> dict:
    return {"psi": _dump(T.psi), "lam": _dump(T.lam), "dcon": _dump(T.dcon), "kform": _dump(T.kform)}


def _dump_bivector(P: Bivector) -> dict[str, str]:
    n = P.chart.dim
    return {_key((i, j)): str(P.comp[i][j]) for i in range(n) for j in range(i + 1, n) if P.comp[i][j]}


def _dump_aff(p: AffFunc) -> dict:
    return {"f": str(p.f), "eta": [str(e) for e in p.eta]}


# -- pipeline pieces --------------------------------------------------------

class _Ctx:
    def __init__(self, model: Model, hamiltonian: str | None, delta, mu, maxdeg: int):
        self.model = model
        self.P = model.bivector
        self.chart = model.chart
        self.h_text = hamiltonian if hamiltonian is not None else model.hamiltonian
        self.delta = delta if delta is not None else (model.delta or None)
        self.mu = mu if mu is not None else (model.mu or None)
        self.maxdeg = maxdeg
        self._T = None

    @property
    def H(self):
        if self.h_text is None:
            raise UsageError("this command needs a Hamiltonian (--hamiltonian or a [hamiltonian] section)")
        return self.chart.parse(self.h_text) if isinstance(self.h_text, str) else self.h_text

    @property
    def T(self) -> InfTriple:
        if self._T is None:
            self._T = extract_triple(self.P)
        return self._T

    def change(self) -> TransChange | None:
        if self.delta is not None:
            return TransChange.from_entries(self.chart, self.delta)
        if self.mu is not None:
            return MuMorphism.from_entries(self.chart, self.mu).delta()
        return None


def _check_poisson(ctx: _Ctx, rep: dict):
    jac = jacobiator(ctx.P)
    rep["verdicts"]["poisson"] = all(v.is_zero() for v in jac.values())
    bad = {_key(k): str(v) for k, v in jac.items() if v}
    if bad:
        rep["data"]["jacobiator"] = bad


def _tangency(ctx: _Ctx, rep: dict):
    rep["verdicts"]["tangent"] = check_tangency(ctx.P)


def _extract(ctx: _Ctx, rep: dict):
    rep["data"]["triple"] = _dump_triple(ctx.T)
    rep["verdicts"]["routes_agree"] = extract_triple_via_algebroid(ctx.P) == ctx.T


def _axioms(ctx: _Ctx, rep: dict):
    report = check_triple_axioms(ctx.T)
    rep["verdicts"]["axioms"] = report.ok
    bad = report.nonzero()
    if bad:
        rep["data"]["axiom_residuals"] = {f"{name}{list(idx)}": str(v) for name, idx, v in bad}


def _linearize(ctx: _Ctx, rep: dict):
    X = hamiltonian_vf(ctx.P, ctx.H)
    L = variation(X)
    rep["data"]["variation"] = {"v": _dump(L.v), "a": _dump(L.a)}
    rep["verdicts"]["variation_matches_series"] = L.to_vector_field() == rescale_pullback(X, 1)[0]


def _torsion(ctx: _Ctx, rep: dict):
    tor = torsion(hamiltonian_vf(ctx.P, ctx.H))
    rep["data"]["torsion"] = _dump(tor.t)
    rep["verdicts"]["invariant_transversal"] = tor.is_zero()


def _hamiltonize(ctx: _Ctx, rep: dict):
    v = hamiltonization_check(ctx.P, ctx.H, ctx.T)
    rep["data"]["affine_hamiltonian"] = _dump_aff(v.hamiltonian)
    rep["data"]["ham_residual"] = _dump(v.residual.r)
    rep["verdicts"]["hamiltonizable"] = v.hamiltonizable
    if v.certificate is not None:
        rep["verdicts"]["certificate"] = all(d.is_zero() for d in v.certificate.values())


def _transform(ctx: _Ctx, rep: dict):
    d = ctx.change()
    if d is None:
        raise UsageError("transform needs --delta, --mu or a [delta]/[mu] section")
    Tt = transform_triple(ctx.T, d)
    Pt = chart_realize(ctx.P, d)
    mu = d.mu()
    gens = [AffFunc.generator(ctx.chart, n) for n in ctx.chart.names]
    rep["data"]["transformed_triple"] = _dump_triple(Tt)
    rep["data"]["realized_bivector"] = _dump_bivector(Pt)
    rep["verdicts"]["realized_poisson"] = is_poisson(Pt)
    rep["verdicts"]["oracle_agrees"] = extract_triple(Pt) == Tt
    rep["verdicts"]["isomorphism"] = all(iso_check(ctx.T, Tt, mu, p, q).is_zero() for p in gens for q in gens)
    if ctx.h_text is not None:
        p = affine_hamiltonian(ctx.H, ctx.chart)
        rep["data"]["mu_residual"] = _dump(mu_residual(ctx.T, p, mu).r)


def _solve_mu(ctx: _Ctx, rep: dict):
    p = affine_hamiltonian(ctx.H, ctx.chart)
    mu = solve_mu(ctx.T, p, ctx.maxdeg)
    rep["verdicts"]["mu_found"] = mu is not None
    if mu is None:
        return
    rep["data"]["mu"] = _dump(mu.mu)
    Pt = chart_realize(ctx.P, mu.delta())
    rep["data"]["realized_bivector"] = _dump_bivector(Pt)
    rep["verdicts"]["realized_hamiltonizable"] = hamiltonization_check(Pt, ctx.H).hamiltonizable


def _coupling(ctx: _Ctx, rep: dict, optional: bool = False):
    T = ctx.T
    try:
        G = leaf_geometry(T)
    except SingularError as exc:
        if not optional:
            raise
        rep["data"]["coupling"] = f"skipped: {exc}"
        return
    s = coupling_form(T, G)
    PL = coupling_tensor(G, s, T.lam)
    gens = [AffFunc.generator(ctx.chart, n) for n in ctx.chart.names]
    rep["data"]["omega"] = _dump(G.omega)
    rep["data"]["gamma"] = _dump(G.gamma)
    rep["data"]["sigma1"] = _dump(s.sigma1)
    rep["data"]["coupling_tensor"] = _dump_bivector(PL.bivector)
    rep["verdicts"]["coupling_poisson"] = is_poisson(PL.bivector)
    rep["verdicts"]["first_order_match"] = all(
        first_order_match_residual(PL, T, p, q).is_zero() for p in gens for q in gens)
    if ctx.h_text is not None and ham_residual(T, affine_hamiltonian(ctx.H, ctx.chart)).is_zero():
        L = variation(hamiltonian_vf(ctx.P, ctx.H))
        res = var_hamiltonian_residual(PL, affine_hamiltonian(ctx.H, ctx.chart), L)
        rep["verdicts"]["var_hamiltonian"] = res.is_zero()


def _all(ctx: _Ctx, rep: dict):
    _check_poisson(ctx, rep)
    _tangency(ctx, rep)
    if not (rep["verdicts"]["poisson"] and rep["verdicts"]["tangent"]):
        return
    _extract(ctx, rep)
    _axioms(ctx, rep)
    if ctx.h_text is not None:
        _linearize(ctx, rep)
        _torsion(ctx, rep)
        _hamiltonize(ctx, rep)
    if ctx.change() is not None:
        _transform(ctx, rep)
    _coupling(ctx, rep, optional=True)


_DISPATCH: dict[str, Callable[[_Ctx, dict], None]] = {
    "check-poisson": _check_poisson,
    "tangency": _tangency,
    "extract": _extract,
    "axioms": _axioms,
    "linearize": _linearize,
    "torsion": _torsion,
    "hamiltonize": _hamiltonize,
    "transform": _transform,
    "solve-mu": _solve_mu,
    "coupling": _coupling,
    "all": _all,
}


def run(command: str, model: ModelFile | Model | str, *, hamiltonian: str | None = None,
        delta: dict | None = None, mu: dict | None = None, maxdeg: int = 1,
        timing: bool = False) -> tuple[dict, int]:
    """Execute one command and return ``(report, exit_code)``.

    ``delta`` and ``mu`` map 0-based ``(i, a)`` to expressions.  Exit code 0
    means every verdict holds, 1 that some verdict is negative and 2 an input
    or precondition error (the report then carries ``error``).
    """
    rep: dict = {"command": command, "verdicts": {}, "data": {}}
    start = time.perf_counter()
    try:
        if command not in _DISPATCH:
            raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        if isinstance(model, str):
            try:
                model = builtin(model)
            except KeyError as exc:
                raise UsageError(exc.args[0]) from None
        elif isinstance(model, ModelFile):
            model = model.to_model()
        rep["model"] = model.name
        ctx = _Ctx(model, hamiltonian, delta, mu, maxdeg)
        if ctx.h_text is not None:
            rep["hamiltonian"] = str(ctx.H)
        _DISPATCH[command](ctx, rep)
        code = 0 if all(rep["verdicts"].values()) else 1
    except (PlinError, ValueError) as exc:
        rep["error"] = f"{type(exc).__name__}: {exc}"
        code = 2
    if timing:
        rep["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    rep["exit_code"] = code
    return rep, code


def format_text(rep: dict) -> str:
    lines = []

    def walk(prefix: str, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list):
            lines.append(f"{prefix}: [{', '.join(str(v) for v in value)}]")
        elif isinstance(value, bool):
            lines.append(f"{prefix}: {'yes' if value else 'no'}")
        else:
            lines.append(f"{prefix}: {value}")

    walk("", rep)
    return "\n".join(lines) + "\n"


def format_json(rep: dict) -> str:
    return json.dumps(rep, sort_keys=True, indent=2) + "\n"


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plin", description="Linearization and Hamiltonization along Poisson submanifolds.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", metavar="PATH", help="model file")
    src.add_argument("--builtin", metavar="NAME", help=f"built-in model ({', '.join(BUILTIN_NAMES)})")
    ap.add_argument("--hamiltonian", metavar="EXPR")
    ap.add_argument("--delta", metavar="PATH", help="file with a [delta] section")
    ap.add_argument("--mu", metavar="PATH", help="file with a [mu] section")
    ap.add_argument("--maxdeg", type=int, default=1)
    ap.add_argument("--json", metavar="PATH", help="also write the JSON report ('-' for stdout instead of text)")
    ap.add_argument("--export", metavar="PATH", help="write the canonical model file")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing (non-deterministic)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.model:
            mf = load_model(args.model)
        else:
            mf = export_model(builtin(args.builtin))
        chart = mf.chart
        delta = parse_matrix_section(Path(args.delta).read_text(), chart, "delta", args.delta) if args.delta else None
        mu = parse_matrix_section(Path(args.mu).read_text(), chart, "mu", args.mu) if args.mu else None
    except (PlinError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    model = mf.to_model()
    if args.builtin:
        model = builtin(args.builtin)
    rep, code = run(args.command, model, hamiltonian=args.hamiltonian, delta=delta, mu=mu,
                    maxdeg=args.maxdeg, timing=args.timing)
    if args.export:
        Path(args.export).write_text(format_model(mf))
    if args.json == "-":
        sys.stdout.write(format_json(rep))
    else:
        sys.stdout.write(format_text(rep))
        if args.json:
            Path(args.json).write_text(format_json(rep))
    if "error" in rep:
        print(f"error: {rep['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
