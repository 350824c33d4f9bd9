"""JSON problem files: parsing, validation and emission.

A problem file describes a group, the pair ``(M, I)``, a curve and a fan::

    {
      "group": {"factors": [{"type": "A", "rank": 2}], "torus_rank": 0},
      "lattice": {"M_basis": [[1, 0]]},
      "I": ["alpha2"],
      "curve": {"kind": "P1", "points": ["0", "inf"]},
      "fan": [{"chart_removed_points": ["inf"], "tail_rays": [[1]],
               "coefficients": [{"point": "0", "vertices": [["1/2"]]}],
               "colors": []}],
      "options": {"canonical_divisor": {"inf": -2}}
    }

Rationals are integers or ``"p/q"`` strings.  Errors carry a JSON path, or a
line and column for malformed JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .fan import DivisorialFan
from .geometry import BStableDivisor
from .pdiv import ColoredPolyhedralDivisor, CurveQDivisor, CurveWithOpen, DivisorError, Vertex
from .polyhedra import Cone, Polyhedron
from .rootdata import DatumError, HorosphericalDatum, RootDatum, colors as datum_colors

SCHEMA_VERSION = 1

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"},
    ]
}
_INT_VECTOR = {"type": "array", "items": {"type": "integer"}}
_RAT_VECTOR = {"type": "array", "items": _RATIONAL}
_POINTS = {"type": "array", "items": {"type": "string"}, "uniqueItems": True}
_CURVE_DIVISOR = {"type": "object", "additionalProperties": {"type": "integer"}}

PROBLEM_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["group", "lattice", "curve", "fan"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"type": "integer"},
        "name": {"type": "string"},
        "group": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "factors": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["type", "rank"],
                        "additionalProperties": False,
                        "properties": {
                            "type": {"enum": ["A", "B", "C", "D", "E", "F", "G"]},
                            "rank": {"type": "integer", "minimum": 1},
                        },
                    },
                },
                "torus_rank": {"type": "integer", "minimum": 0},
            },
        },
        "lattice": {
            "type": "object",
            "required": ["M_basis"],
            "additionalProperties": False,
            "properties": {"M_basis": {"type": "array", "items": _INT_VECTOR}},
        },
        "I": {"type": "array", "items": {"type": "string"}, "uniqueItems": True},
        "curve": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {
                    "oneOf": [
                        {"const": "P1"},
                        {
                            "type": "object",
                            "required": ["genus"],
                            "additionalProperties": False,
                            "properties": {"genus": {"type": "integer", "minimum": 0}},
                        },
                    ]
                },
                "points": _POINTS,
            },
        },
        "fan": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["tail_rays"],
                "additionalProperties": False,
                "properties": {
                    "chart_removed_points": _POINTS,
                    "tail_rays": {"type": "array", "items": _INT_VECTOR},
                    "coefficients": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["point", "vertices"],
                            "additionalProperties": False,
                            "properties": {
                                "point": {"type": "string"},
                                "vertices": {"type": "array", "minItems": 1, "items": _RAT_VECTOR},
                            },
                        },
                    },
                    "colors": {"type": "array", "items": {"type": "string"}, "uniqueItems": True},
                },
            },
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "canonical_divisor": _CURVE_DIVISOR,
                "commands": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}

DIVISOR_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["point", "vertex", "coefficient"],
                "additionalProperties": False,
                "properties": {"point": {"type": "string"}, "vertex": _RAT_VECTOR, "coefficient": _RATIONAL},
            },
        },
        "rays": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["ray", "coefficient"],
                "additionalProperties": False,
                "properties": {"ray": _INT_VECTOR, "coefficient": _RATIONAL},
            },
        },
        "colors": {"type": "object", "additionalProperties": _RATIONAL},
        "curve": {"type": "object", "additionalProperties": _RATIONAL},
    },
}


class ProblemError(Exception):
    """A problem file that cannot be used, with a machine-readable ``code``."""

    def __init__(self, code: str, message: str, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.path = path
        self.line = line
        self.column = column

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.path is not None:
            out["path"] = self.path
        if self.line is not None:
            out["line"], out["column"] = self.line, self.column
        return out

    def __str__(self) -> str:
        where = ""
        if self.path is not None:
            where = f" at {self.path}"
        elif self.line is not None:
            where = f" at line {self.line}, column {self.column}"
        return f"{self.code} error{where}: {self.message}"


def json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def rational(x) -> Fraction:
    return Fraction(x.replace(" ", "")) if isinstance(x, str) else Fraction(x)


def format_rational(x) -> int | str:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemError("json", f"{source}: {e.msg}", line=e.lineno, column=e.colno) from None


def _check_schema(data: Any, schema: Mapping) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        e = jsonschema.exceptions.best_match(errors)
        raise ProblemError("schema", e.message, path=json_path(e.absolute_path))


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemError("io", f"cannot read {path}: {e.strerror or e}") from None


def bundled(name: str) -> str:
    """Text of a bundled example problem such as ``sl3_example.json``."""
    res = resources.files("horosphere") / "data" / name
    if not res.is_file():
        raise ProblemError("io", f"no bundled problem named {name}")
    return res.read_text(encoding="utf-8")


def bundled_names() -> list[str]:
    return sorted(p.name for p in (resources.files("horosphere") / "data").iterdir() if p.name.endswith(".json"))


@dataclass(frozen=True)
class ProblemFile:
    """A validated problem; ``data`` is the normalized JSON document."""

    data: Mapping[str, Any] = field(repr=False)
    datum: HorosphericalDatum
    fan: DivisorialFan
    canonical: CurveQDivisor | None = None

    @property
    def commands(self) -> tuple[str, ...]:
        return tuple(self.data.get("options", {}).get("commands", ()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return (self.datum, self.fan, self.canonical) == (other.datum, other.fan, other.canonical)

    def __hash__(self) -> int:
        return hash((self.datum, self.fan))


def parse_text(text: str, source: str = "<string>") -> ProblemFile:
    return parse_data(_load_json(text, source))


def parse(path: str | Path) -> ProblemFile:
    return parse_text(read_text(path), str(path))


def parse_data(data: Any) -> ProblemFile:
    _check_schema(data, PROBLEM_SCHEMA)
    group = data["group"]
    try:
        rd = RootDatum(tuple((f["type"], f["rank"]) for f in group.get("factors", [])), group.get("torus_rank", 0))
    except DatumError as e:
        raise ProblemError("datum", str(e), path="$.group") from None
    basis = data["lattice"]["M_basis"]
    for k, row in enumerate(basis):
        if len(row) != rd.character_rank:
            raise ProblemError("datum", f"M basis vector has length {len(row)}, expected {rd.character_rank}",
                               path=json_path(["lattice", "M_basis", k]))
    unknown = [a for a in data.get("I", []) if a not in rd.simple_roots]
    if unknown:
        raise ProblemError("datum", f"unknown simple roots {unknown}; available {list(rd.simple_roots)}", path="$.I")
    try:
        datum = HorosphericalDatum(rd, tuple(tuple(r) for r in basis), frozenset(data.get("I", [])))
    except DatumError as e:
        raise ProblemError("datum", str(e), path="$.lattice.M_basis") from None
    bad = datum.pairing_violations()
    if bad:
        k, alpha, v = bad[0]
        raise ProblemError(
            "datum",
            f"<m, {alpha}^vee> = {v} for M basis vector {k}, but {alpha} is in I (the pairing must vanish)",
            path=json_path(["lattice", "M_basis", k]),
        )
    kind = data["curve"]["kind"]
    genus = 0 if kind == "P1" else kind["genus"]
    n = datum.rank
    images = {c.alpha: c for c in datum_colors(datum)}
    items = []
    for i, item in enumerate(data["fan"]):
        where = ["fan", i]
        for k, r in enumerate(item["tail_rays"]):
            if len(r) != n:
                raise ProblemError("semantic", f"tail ray of length {len(r)} in rank {n}",
                                   path=json_path(where + ["tail_rays", k]))
        tail = Cone.from_generators(item["tail_rays"], n)
        if not tail.is_strongly_convex():
            raise ProblemError("semantic", "tail cone is not strongly convex", path=json_path(where + ["tail_rays"]))
        coeffs = {}
        for k, c in enumerate(item.get("coefficients", [])):
            verts = [tuple(rational(x) for x in v) for v in c["vertices"]]
            if any(len(v) != n for v in verts):
                raise ProblemError("semantic", f"vertex length differs from rank {n}",
                                   path=json_path(where + ["coefficients", k, "vertices"]))
            if c["point"] in coeffs:
                raise ProblemError("semantic", f"point {c['point']} listed twice",
                                   path=json_path(where + ["coefficients", k, "point"]))
            coeffs[c["point"]] = Polyhedron(verts, tail)
        cols = []
        for k, a in enumerate(item.get("colors", [])):
            if a not in images:
                raise ProblemError("semantic", f"{a} is not a color (colors are indexed by S minus I: {sorted(images)})",
                                   path=json_path(where + ["colors", k]))
            if not any(images[a].image) or not tail.contains(images[a].image):
                raise ProblemError("semantic", f"color {a} has image {images[a].image} outside the tail cone or zero",
                                   path=json_path(where + ["colors", k]))
            cols.append(images[a])
        base = CurveWithOpen(genus, frozenset(item.get("chart_removed_points", [])))
        try:
            items.append(ColoredPolyhedralDivisor(base, tail, coeffs, cols))
        except DivisorError as e:
            raise ProblemError("semantic", str(e), path=json_path(where)) from None
    canon = data.get("options", {}).get("canonical_divisor")
    return ProblemFile(data, datum, DivisorialFan(items, datum), CurveQDivisor(canon) if canon is not None else None)


def fan_to_json(fan: DivisorialFan) -> list[dict[str, Any]]:
    out = []
    for D in fan.items:
        out.append({
            "chart_removed_points": sorted(D.base.removed),
            "tail_rays": [list(r) for r in D.tail.rays],
            "coefficients": [
                {"point": z, "vertices": [[format_rational(x) for x in v] for v in D.coeffs[z].vertices]}
                for z in sorted(D.coeffs)
            ],
            "colors": sorted(c.alpha for c in D.colors),
        })
    return out


def emit(problem: ProblemFile) -> dict[str, Any]:
    """JSON document for ``problem``; parsing it gives back an equal problem."""
    d = problem.datum
    rd = d.root_datum
    points = sorted({z for D in problem.fan.items for z in list(D.coeffs) + list(D.base.removed)})
    kind: Any = "P1" if problem.fan.genus == 0 else {"genus": problem.fan.genus}
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "group": {"factors": [{"type": t, "rank": r} for t, r in rd.simple_factors], "torus_rank": rd.torus_rank},
        "lattice": {"M_basis": [list(r) for r in d.M_basis]},
        "I": sorted(d.I, key=rd.index),
        "curve": {"kind": kind, "points": points},
        "fan": fan_to_json(problem.fan),
    }
    if "name" in problem.data:
        out["name"] = problem.data["name"]
    if problem.canonical is not None:
        out["options"] = {"canonical_divisor": {z: int(c) for z, c in sorted(problem.canonical.items())}}
    return out


def with_fan(problem: ProblemFile, fan: DivisorialFan) -> ProblemFile:
    data = dict(emit(problem))
    data["fan"] = fan_to_json(fan)
    return ProblemFile(data, problem.datum, DivisorialFan(fan.items, problem.datum), problem.canonical)


def parse_divisor_data(data: Any, problem: ProblemFile) -> BStableDivisor:
    _check_schema(data, DIVISOR_SCHEMA)
    n = problem.datum.rank
    vert, ray = {}, {}
    for k, e in enumerate(data.get("vertices", [])):
        if len(e["vertex"]) != n:
            raise ProblemError("semantic", f"vertex length differs from rank {n}", path=json_path(["vertices", k]))
        vert[Vertex(e["point"], tuple(rational(x) for x in e["vertex"]))] = rational(e["coefficient"])
    for k, e in enumerate(data.get("rays", [])):
        if len(e["ray"]) != n:
            raise ProblemError("semantic", f"ray length differs from rank {n}", path=json_path(["rays", k]))
        ray[tuple(e["ray"])] = rational(e["coefficient"])
    colors = {a: rational(c) for a, c in data.get("colors", {}).items()}
    unknown = sorted(set(colors) - set(problem.datum.color_roots))
    if unknown:
        raise ProblemError("semantic", f"unknown colors {unknown}", path="$.colors")
    curve = CurveQDivisor({z: rational(c) for z, c in data.get("curve", {}).items()})
    return BStableDivisor(vert, ray, colors, curve)


def parse_divisor(path: str | Path, problem: ProblemFile) -> BStableDivisor:
    return parse_divisor_data(_load_json(read_text(path), str(path)), problem)


def parse_curve_divisor(path: str | Path) -> CurveQDivisor:
    data = _load_json(read_text(path), str(path))
    if isinstance(data, dict) and "curve" in data:
        data = data["curve"]
    _check_schema(data, _CURVE_DIVISOR)
    return CurveQDivisor(data)


def divisor_to_json(D: BStableDivisor) -> dict[str, Any]:
    return {
        "vertices": [{"point": v.point, "vertex": [format_rational(x) for x in v.v], "coefficient": format_rational(c)}
                     for v, c in D.vert.items()],
        "rays": [{"ray": list(r), "coefficient": format_rational(c)} for r, c in D.ray.items()],
        "colors": {a: format_rational(c) for a, c in D.color.items()},
        "curve": {z: format_rational(c) for z, c in sorted(D.curve.items())},
    }
