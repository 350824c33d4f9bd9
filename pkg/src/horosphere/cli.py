"""Command-line front end: ``horosphere <command> <file> [--json|--text]``.

Exit status is 0 on success, 2 when a result is mathematically undecided and
1 on any error.  Set ``HOROSPHERE_LOG`` (``DEBUG``, ``INFO``, ...) for log
output on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .fan import (
    GENERIC,
    DivisorialFan,
    FanError,
    enumerate_germs,
    is_complete,
    resolve,
    saturate,
    validate_fan,
)
from .geometry import (
    BStableDivisor,
    PLFunction,
    Verdict,
    canonical_divisor,
    class_group,
    class_group_tvariety,
    has_rational_singularities,
    is_cartier,
    is_factorial,
    is_log_terminal,
    is_q_gorenstein,
    is_smooth,
    ray_label,
)
from .lattice import DimensionMismatch
from .pdiv import DivisorError, is_proper
from .problem import (
    SCHEMA_VERSION,
    ProblemError,
    ProblemFile,
    bundled,
    bundled_names,
    divisor_to_json,
    emit,
    fan_to_json,
    format_rational,
    parse_curve_divisor,
    parse_divisor,
    parse_text,
    read_text,
    with_fan,
)
from .rootdata import DatumError

log = logging.getLogger("horosphere")

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2

HELP = {
    "validate": "check coherence of the fan and completeness",
    "germs": "list colored data of germs",
    "proper": "properness certificates of the items",
    "rational": "rational singularities",
    "smooth": "smoothness (may be undecided for projective items)",
    "classgroup": "divisor class group",
    "factorial": "factoriality with diagnostics",
    "canonical": "canonical divisor",
    "cartier": "decide whether a B-stable divisor is Cartier",
    "gorenstein": "Q-Gorenstein index",
    "logterminal": "log-terminal singularities",
    "resolve": "decolor and resolve to a regular fan",
    "analyze": "run the main checks at once",
}
COMMANDS = tuple(HELP)


@dataclass
class Report:
    command: str
    results: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    undecided: bool = False
    error: dict[str, Any] | None = None

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_ERROR
        return EXIT_UNDECIDED if self.undecided else EXIT_OK

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": {EXIT_OK: "ok", EXIT_ERROR: "error", EXIT_UNDECIDED: "undecided"}[self.exit_code],
            "warnings": sorted(set(self.warnings)),
        }
        if self.error is not None:
            out["error"] = self.error
        else:
            out["results"] = self.results
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        if self.error is not None:
            lines.append(f"error [{self.error['code']}]: {self.error['message']}")
            for k in ("path", "line", "column"):
                if k in self.error:
                    lines.append(f"  {k}: {self.error[k]}")
        else:
            for key in sorted(self.results):
                lines.append(f"{key}: {_text_value(self.results[key])}")
        for w in sorted(set(self.warnings)):
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"


def _text_value(v: Any) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return json.dumps(v, sort_keys=True, separators=(", ", ": "))


# ---------------------------------------------------------------------------
# JSON encodings of results
# ---------------------------------------------------------------------------

def _vec(v) -> list:
    return [format_rational(x) for x in v]


def _verdict(v: Verdict) -> bool | str:
    return "undecided" if v is Verdict.UNDECIDED else v is Verdict.TRUE


def _cone(c) -> dict[str, Any]:
    return {"rays": [list(r) for r in c.rays], "lineality": [list(r) for r in c.lineality]}


def _theta(theta: PLFunction | None) -> dict[str, Any] | None:
    if theta is None:
        return None
    return {
        "pieces": [
            {"item": i, "m": list(p.m),
             "local": {z: {"m_z": list(mz), "gamma_z": g} for z, (mz, g) in sorted(p.local.items())}}
            for i, p in enumerate(theta.pieces)
        ],
        "r": dict(sorted(theta.r.items())),
    }


def _divisor(D: BStableDivisor) -> dict[str, Any]:
    out = divisor_to_json(D)
    out["text"] = str(D)
    return out


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@dataclass
class Context:
    problem: ProblemFile
    divisor_path: str | None = None
    canonical_path: str | None = None

    @property
    def fan(self) -> DivisorialFan:
        return self.problem.fan

    def K_C(self):
        if self.canonical_path is not None:
            return parse_curve_divisor(self.canonical_path)
        return self.problem.canonical


def _require_coherent(fan: DivisorialFan) -> None:
    check = validate_fan(fan, require_closure=False)
    if not check:
        where = f"items {check.pair}" + (f" at point {check.point}" if check.point else "")
        raise FanError(f"not a divisorial fan: {check.reason} ({where})")


def cmd_validate(ctx: Context, rep: Report) -> None:
    strict = validate_fan(ctx.fan)
    loose = strict if strict else validate_fan(ctx.fan, require_closure=False)
    rep.results["valid"] = strict.ok
    rep.results["pairwise_coherent"] = loose.ok
    failure = strict if not strict else None
    rep.results["failure"] = None if failure is None else {
        "items": list(failure.pair) if failure.pair else None, "point": failure.point, "reason": failure.reason}
    if loose.ok:
        rep.results["complete"] = is_complete(ctx.fan)
        if not strict.ok:
            missing = len(saturate(ctx.fan)) - len(ctx.fan)
            rep.warnings.append(f"pairwise intersections are not items of the fan; saturating adds {missing} items")


def cmd_germs(ctx: Context, rep: Report) -> None:
    germs = []
    for g in enumerate_germs(ctx.fan):
        germs.append({
            "kind": g.kind, "point": g.point, "item": g.item, "cone": _cone(g.cone), "dim": g.cone.dim,
            "colors": sorted(g.colors), "divisorial": g.is_divisorial, "flags": list(g.flags),
        })
        if "ambiguous-case-B" in g.flags:
            rep.warnings.append("some horizontal data of projective items have an ambiguous hyperface type")
    rep.results["germs"] = germs
    rep.results["generic_point"] = GENERIC


def cmd_proper(ctx: Context, rep: Report) -> None:
    items = []
    for i, D in enumerate(ctx.fan.items):
        c = is_proper(D)
        items.append({"item": i, "proper": c.proper, "reason": c.reason,
                      "degree_vertices": [_vec(v) for v in c.degree_vertices],
                      "assumed_principal": c.assumed_principal})
        if c.assumed_principal:
            rep.warnings.append("principality on a curve of positive genus was assumed, not checked")
    rep.results["items"] = items
    rep.results["proper"] = all(x["proper"] for x in items)


def cmd_rational(ctx: Context, rep: Report) -> None:
    items = []
    for i, D in enumerate(ctx.fan.items):
        r = has_rational_singularities(D)
        items.append({"item": i, "rational": r.rational, "reason": r.reason,
                      "witness": list(r.witness) if r.witness else None})
    rep.results["items"] = items
    rep.results["rational"] = all(x["rational"] for x in items)


def cmd_smooth(ctx: Context, rep: Report) -> None:
    _require_coherent(ctx.fan)
    s = is_smooth(ctx.fan)
    rep.results["smooth"] = _verdict(s.verdict)
    rep.results["smooth_detail"] = {"reason": s.reason, "item": s.item, "point": s.point}
    if s.verdict is Verdict.UNDECIDED:
        rep.undecided = True
        rep.warnings.append("smoothness undecided: a projective item has no two-point normal form")


def cmd_classgroup(ctx: Context, rep: Report) -> None:
    _require_coherent(ctx.fan)
    cl = class_group(ctx.fan)
    cy = class_group_tvariety(ctx.fan)
    p = cl.presentation
    rep.results["class_group"] = str(cl)
    rep.results["symbolic"] = cl.symbolic
    rep.results["free_rank"] = None if cl.symbolic else p.free_rank
    rep.results["torsion"] = None if cl.symbolic else list(p.invariant_factors)
    rep.warnings.extend(p.notes)
    rep.results["generators"] = list(p.generator_labels)
    rep.results["relations"] = [list(r) for r in p.relations.entries]
    rep.results["class_group_Y"] = str(cy)


def cmd_factorial(ctx: Context, rep: Report) -> None:
    _require_coherent(ctx.fan)
    f = is_factorial(ctx.fan)
    rep.results["factorial"] = f.factorial
    rep.results["class_group"] = f.class_group
    rep.results["condition_i"] = f.condition_i
    rep.results["condition_ii"] = None if f.condition_ii is None else {
        a: (list(m) if m is not None else None) for a, m in sorted(f.condition_ii.items())}


def cmd_canonical(ctx: Context, rep: Report) -> None:
    K = canonical_divisor(ctx.fan, ctx.K_C())
    rep.results["canonical_divisor"] = _divisor(K.divisor)
    rep.results["K_C"] = {z: format_rational(c) for z, c in sorted(K.K_C.items())}
    rep.warnings.append(K.note)


def cmd_cartier(ctx: Context, rep: Report) -> None:
    if ctx.divisor_path is None:
        raise ProblemError("usage", "cartier needs a divisor file")
    _require_coherent(ctx.fan)
    D = parse_divisor(ctx.divisor_path, ctx.problem)
    res = is_cartier(ctx.fan, D)
    rep.results["divisor"] = _divisor(D)
    rep.results["cartier"] = res.cartier
    rep.results["reason"] = res.reason
    rep.results["theta"] = _theta(res.theta)


def cmd_gorenstein(ctx: Context, rep: Report) -> None:
    _require_coherent(ctx.fan)
    g = is_q_gorenstein(ctx.fan, ctx.K_C())
    rep.results["q_gorenstein"] = g is not None
    rep.results["gorenstein_index"] = g.index if g else None
    rep.results["theta"] = _theta(g.theta) if g else None
    rep.warnings.append("vertex coefficients of theta use mu(<m_z, v> + gamma_z)")
    if g:
        rep.warnings.extend(n for n in g.notes if n.startswith("inf is special"))


def cmd_logterminal(ctx: Context, rep: Report) -> None:
    items = []
    for i, D in enumerate(ctx.fan.items):
        r = is_log_terminal(DivisorialFan([D], ctx.fan.datum), K_C=ctx.K_C())
        items.append({"item": i, "log_terminal": r.log_terminal, "reason": r.reason,
                      "mu_sum": None if r.mu_sum is None else format_rational(r.mu_sum)})
    rep.results["items"] = items
    rep.results["log_terminal"] = all(x["log_terminal"] for x in items)


def cmd_resolve(ctx: Context, rep: Report) -> None:
    _require_coherent(ctx.fan)
    res = resolve(ctx.fan)
    rep.results["fan"] = fan_to_json(res.fan)
    rep.results["items"] = len(res.fan)
    rep.results["exceptional_rays"] = [{"ray": list(r), "label": ray_label(r)} for r in res.exceptional_rays]
    rep.results["exceptional_vertices"] = [
        {"point": v.point, "vertex": _vec(v.v), "mu": v.mu, "slice_ray": list(v.primitive), "label": v.label()}
        for v in res.exceptional_vertices
    ]
    rep.results["decolored_germs"] = [
        {"kind": g.kind, "point": g.point, "cone": _cone(g.cone), "colors": sorted(g.colors),
         "divisorial_after": h.is_divisorial}
        for g, h in res.decolored_germs
    ]
    rep.results["smooth"] = _verdict(is_smooth(res.fan).verdict)
    rep.results["problem"] = emit(with_fan(ctx.problem, res.fan))


def cmd_analyze(ctx: Context, rep: Report) -> None:
    summary: dict[str, Any] = {}
    steps: list[tuple[str, Callable[[Context, Report], None], Sequence[str]]] = [
        ("validate", cmd_validate, ("valid", "pairwise_coherent", "complete")),
        ("proper", cmd_proper, ("proper",)),
        ("rational", cmd_rational, ("rational",)),
        ("smooth", cmd_smooth, ("smooth",)),
        ("classgroup", cmd_classgroup, ("class_group", "class_group_Y")),
        ("factorial", cmd_factorial, ("factorial",)),
        ("canonical", cmd_canonical, ("canonical_divisor",)),
        ("gorenstein", cmd_gorenstein, ("gorenstein_index",)),
        ("logterminal", cmd_logterminal, ("log_terminal",)),
    ]
    for name, fn, keys in steps:
        sub = Report(name)
        try:
            fn(ctx, sub)
        except (FanError, DivisorError, ArithmeticError, ValueError) as e:
            rep.warnings.append(f"{name}: {e}")
            for k in keys:
                summary[k] = None
            continue
        rep.warnings.extend(sub.warnings)
        rep.undecided |= sub.undecided
        for k in keys:
            summary[k] = sub.results.get(k)
    if isinstance(summary.get("canonical_divisor"), dict):
        summary["canonical_divisor"] = summary["canonical_divisor"]["text"]
    rep.results.update(summary)


HANDLERS: dict[str, Callable[[Context, Report], None]] = {
    "validate": cmd_validate, "germs": cmd_germs, "proper": cmd_proper, "rational": cmd_rational,
    "smooth": cmd_smooth, "classgroup": cmd_classgroup, "factorial": cmd_factorial,
    "canonical": cmd_canonical, "cartier": cmd_cartier, "gorenstein": cmd_gorenstein,
    "logterminal": cmd_logterminal, "resolve": cmd_resolve, "analyze": cmd_analyze,
}


def run(problem: ProblemFile, command: str, divisor_path: str | None = None,
        canonical_path: str | None = None) -> Report:
    """Run one command on a parsed problem and collect the report."""
    rep = Report(command)
    if command not in HANDLERS:
        rep.error = {"code": "usage", "message": f"unknown command {command}"}
        return rep
    ctx = Context(problem, divisor_path, canonical_path)
    t0 = time.perf_counter()
    try:
        HANDLERS[command](ctx, rep)
    except ProblemError as e:
        rep.error = e.as_dict()
    except (FanError, DivisorError, DatumError, DimensionMismatch) as e:
        rep.error = {"code": type(e).__name__, "message": str(e)}
    except (ArithmeticError, ValueError) as e:
        rep.error = {"code": "math", "message": str(e)}
    log.info("%s finished in %.3fs", command, time.perf_counter() - t0)
    return rep


def load_problem(path: str) -> ProblemFile:
    """Parse ``path``; a bare bundled name such as ``sl3_example.json`` also works."""
    p = Path(path)
    if not p.exists() and p.name == path and path in bundled_names():
        log.info("using bundled problem %s", path)
        return parse_text(bundled(path), path)
    return parse_text(read_text(p), path)


def _configure_logging() -> None:
    level = os.environ.get("HOROSPHERE_LOG")
    if not level:
        return
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horosphere",
        description="Invariants of horospherical varieties of complexity one from colored divisorial fans.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("file", help="problem file (JSON), or the name of a bundled example")
        if name == "cartier":
            p.add_argument("divisor", help="divisor file (JSON)")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="machine-readable report")
        fmt.add_argument("--text", dest="fmt", action="store_const", const="text", help="human-readable summary (default)")
        p.add_argument("--canonical", metavar="DIVISOR_FILE", help="canonical divisor K_C of the curve (JSON)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    fmt = args.fmt or "text"
    try:
        problem = load_problem(args.file)
    except ProblemError as e:
        rep = Report(args.command, error=e.as_dict())
    else:
        rep = run(problem, args.command, getattr(args, "divisor", None), args.canonical)
    out = rep.to_json() if fmt == "json" else rep.to_text()
    stream = sys.stderr if rep.error is not None and fmt == "text" else sys.stdout
    stream.write(out)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
