"""Scenario documents: what to build and which suite to run on it.

A scenario is a JSON object with a mandatory ``"version": 1`` entry::

    {
      "version": 1,
      "name": "x-plus-sin",
      "suite": "stability",
      "structure": {"name": "reals-add"},
      "target": {"kind": "real"},
      "map": {"expr": "x + sin(x)"},
      "control": {"constant": 4},
      "probes": {"grid": [-10, 10, 41]},
      "params": {"series_point": 1.0},
      "tol": 1e-9, "iter_tol": 1e-12, "n_max": 60, "seed": 0
    }

Unknown keys are rejected.  Errors carry the offending field and, when the
document came from text, the line where that field appears.

Table files are plain text with a leading version line::

    ternstab-table 1          ternstab-map 1
    order 3                   target vector 2
    ternary                   0.5 1.0
    0 1 2 1 2 0 ...           -2 0
                              ...
"""

from __future__ import annotations

import copy
import json
import math
import os
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ExpressionError
from ..logdomain import LogScalar
from ..maps import Certificate, ControlFunction, MapSpec
from ..target_spaces import TargetSpace
from ..ternary_algebra import (Mat2, Poly, ProbeSet,
                               TernaryStructure, by_name, derive_from_binary, from_table,
                               probe_set, random_associative_binary, random_table)

SCENARIO_VERSION = 1
TABLE_HEADER = "ternstab-table 1"
MAP_HEADER = "ternstab-map 1"

SUITES = ("stability", "superstability", "lemma", "baker", "axioms")
TOP_KEYS = {"version", "name", "suite", "structure", "target", "map", "control", "probes",
            "params", "tol", "iter_tol", "n_max", "seed", "output"}
STRUCTURE_KEYS = {"name", "table_file", "ternary_table", "binary_table", "random_ternary",
                  "random_associative"}
TARGET_KEYS = {"kind", "dim"}
MAP_KEYS = {"expr", "table", "table_file", "hom", "perturbation"}
CONTROL_KEYS = {"constant", "expr", "certificate"}
CERT_KEYS = {"C", "lambda", "N0"}
PROBE_KEYS = {"exhaustive", "grid", "generators", "depth", "points"}
PARAM_KEYS = {
    "stability": {"series_point", "series_length"},
    "superstability": {"growth_u", "growth_n_max", "phi_map", "alpha"},
    "lemma": {"draws"},
    "baker": {"epsilon", "triples"},
    "axioms": set(),
}
OUTPUT_KEYS = {"dir"}
NEEDS_MAP = {"stability", "superstability"}


@dataclass
class Scenario:
    name: str
    suite: str
    structure: dict | None = None
    target: dict | None = None
    map: dict | None = None
    control: dict | None = None
    probes: dict | None = None
    params: dict = field(default_factory=dict)
    tol: float = 1e-9
    iter_tol: float = 1e-12
    n_max: int = 60
    seed: int = 0
    output: dict | None = None
    base_dir: str = field(default=".", compare=False)

    def to_dict(self) -> dict:
        out = {"version": SCENARIO_VERSION}
        for f in fields(self):
            if f.name == "base_dir":
                continue
            value = getattr(self, f.name)
            if value is None or (f.name == "params" and not value):
                continue
            out[f.name] = copy.deepcopy(value)
        return out

    # -- wiring ---------------------------------------------------------------
    def rng(self, stream: int) -> np.random.Generator:
        """Independent seeded stream (0: structure, 1: suite draws)."""
        return np.random.default_rng([self.seed, stream])

    def path(self, name: str) -> Path:
        p = Path(name)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def build_structure(self) -> TernaryStructure:
        spec = self.structure or {"name": "reals-add"}
        return _build_structure(spec, self)

    def build_target(self) -> TargetSpace:
        spec = self.target
        return TargetSpace(spec["kind"], spec.get("dim", 1))

    def build_map(self, G: TernaryStructure, S: TargetSpace, spec: dict | None = None
                  ) -> MapSpec:
        spec = spec if spec is not None else self.map
        if "expr" in spec:
            return MapSpec.from_expression(G, S, spec["expr"])
        if "hom" in spec:
            return MapSpec.perturbed(G, S, spec["hom"], spec["perturbation"])
        if "table" in spec:
            return MapSpec.from_table(G, S, [_value_from_json(S, v) for v in spec["table"]])
        return MapSpec.from_table(G, S, read_map_file(self.path(spec["table_file"]), S))

    def build_control(self, spec: dict | None = None, variables=("x", "y", "z")
                      ) -> ControlFunction:
        spec = spec if spec is not None else self.control
        if "constant" in spec:
            return ControlFunction.constant(spec["constant"], variables)
        cert = None
        if "certificate" in spec:
            c = spec["certificate"]
            cert = Certificate(c["C"], c["lambda"], c.get("N0", 0))
        return ControlFunction.expression(spec["expr"], cert, variables)

    def build_probes(self, G: TernaryStructure) -> ProbeSet:
        spec = self.probes or {"exhaustive": True}
        if spec.get("exhaustive"):
            return ProbeSet.exhaustive_of(G)
        if "grid" in spec:
            lo, hi, count = spec["grid"]
            return ProbeSet.grid(G, lo, hi, int(count))
        if "generators" in spec:
            gens = [element_from_json(G, g) for g in spec["generators"]]
            return probe_set(G, gens, int(spec.get("depth", 1)))
        return ProbeSet.from_elements(G, [element_from_json(G, p) for p in spec["points"]])


# --------------------------------------------------------------------------
# elements and values in JSON

def element_from_json(G: TernaryStructure, v):
    if G.is_finite:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError(f"{v!r} is not an element index")
        return v
    fam = G.family
    if fam == "reals-add":
        return float(v)
    if fam == "posreals-mul":
        if isinstance(v, dict):
            return LogScalar(1, float(v["log"]))
        return LogScalar.from_value(float(v))
    if fam in ("odd-polys", "complex-polys"):
        return Poly(tuple(_complex(c) for c in v))
    if fam == "matrix2-mul":
        flat = np.asarray(v, dtype=float).reshape(-1)
        return Mat2(*(float(c) for c in flat))
    raise ValueError(f"no JSON form for elements of {G.name}")


def element_to_json(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _float(float(x))
    if isinstance(x, LogScalar):
        return {"log": _float(x.log_mag)} if x.sign == 1 else str(x)
    if isinstance(x, Poly):
        return [_complex_json(c) for c in x.coeffs]
    if isinstance(x, Mat2):
        return [_float(c) for c in x.as_tuple()]
    return str(x)


def _complex(c):
    if isinstance(c, (list, tuple)):
        return complex(float(c[0]), float(c[1]))
    return complex(c)


def _complex_json(c):
    c = complex(c)
    return _float(c.real) if c.imag == 0 else [_float(c.real), _float(c.imag)]


def _float(v: float):
    return v if math.isfinite(v) else repr(v)


def _value_from_json(S: TargetSpace, v):
    if S.kind == "complex":
        return _complex(v)
    if S.kind == "real":
        return float(v)
    arr = np.asarray(v, dtype=float)
    return arr.reshape(S.value_shape)


# --------------------------------------------------------------------------
# table files

def read_table_file(path: Path) -> TernaryStructure:
    lines = _data_lines(path, TABLE_HEADER)
    if len(lines) < 2:
        raise ConfigError(f"{path}: expected 'order n', a kind line and entries")
    m = re.fullmatch(r"order\s+(\d+)", lines[0][1])
    if not m:
        raise ConfigError(f"{path}:{lines[0][0]}: expected 'order n'")
    n = int(m.group(1))
    kind = lines[1][1]
    if kind not in ("ternary", "binary"):
        raise ConfigError(f"{path}:{lines[1][0]}: kind must be 'ternary' or 'binary'")
    try:
        entries = [int(tok) for _, text in lines[2:] for tok in text.split()]
    except ValueError as exc:
        raise ConfigError(f"{path}: non-integer entry ({exc})") from None
    want = n**3 if kind == "ternary" else n * n
    if len(entries) != want:
        raise ConfigError(f"{path}: {kind} table of order {n} needs {want} entries, "
                          f"found {len(entries)}")
    if kind == "ternary":
        return from_table(n, entries, name=path.stem)
    return derive_from_binary(np.asarray(entries).reshape(n, n), name=path.stem)


def write_table_file(path: Path, G: TernaryStructure):
    if G.kind == "derived":
        body, kind = G.binary, "binary"
    else:
        body, kind = G.table.reshape(-1, G.size), "ternary"
    rows = [" ".join(str(int(v)) for v in row) for row in np.asarray(body).reshape(-1, G.size)]
    text = "\n".join([TABLE_HEADER, f"order {G.size}", kind, *rows]) + "\n"
    Path(path).write_text(text)


def read_map_file(path: Path, S: TargetSpace) -> list:
    lines = _data_lines(path, MAP_HEADER)
    if not lines:
        raise ConfigError(f"{path}: missing 'target' line")
    words = lines[0][1].split()
    if words[:1] != ["target"] or len(words) not in (2, 3):
        raise ConfigError(f"{path}:{lines[0][0]}: expected 'target <kind> [dim]'")
    declared = TargetSpace(words[1], int(words[2]) if len(words) == 3 else 1)
    if declared != S:
        raise ConfigError(f"{path}: file declares {declared.name}, scenario wants {S.name}")
    width = {"complex": 2, "real": 1, "matrix2": 4}.get(S.kind, S.dim)
    values = []
    for lineno, text in lines[1:]:
        try:
            nums = [float(tok) for tok in text.split()]
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: non-numeric value") from None
        if len(nums) != width:
            raise ConfigError(f"{path}:{lineno}: expected {width} numbers, found {len(nums)}")
        if S.kind == "complex":
            values.append(complex(nums[0], nums[1]))
        elif S.kind == "real":
            values.append(nums[0])
        else:
            values.append(np.asarray(nums).reshape(S.value_shape))
    return values


def _data_lines(path: Path, header: str) -> list[tuple[int, str]]:
    try:
        raw = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    if not raw or raw[0].strip() != header:
        raise ConfigError(f"{path}:1: expected version line {header!r}")
    out = []
    for i, line in enumerate(raw[1:], start=2):
        text = line.split("#", 1)[0].strip()
        if text:
            out.append((i, text))
    return out


# --------------------------------------------------------------------------
# parsing and validation

class _Doc:
    """Error helper that knows where each key sits in the source text."""

    def __init__(self, text: str | None, source: str):
        self.text = text
        self.source = source

    def line_of(self, key: str) -> int | None:
        if self.text is None:
            return None
        needle = f'"{key}"'
        for i, line in enumerate(self.text.splitlines(), start=1):
            if needle in line:
                return i
        return None

    def error(self, fieldpath: str, message: str) -> ConfigError:
        key = fieldpath.rsplit(".", 1)[-1]
        line = self.line_of(key)
        where = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{where}: field '{fieldpath}': {message}")


def _check_keys(doc: _Doc, obj, allowed: set, where: str):
    if not isinstance(obj, dict):
        raise doc.error(where, "expected an object")
    for key in obj:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise doc.error(path, f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _exactly_one(doc: _Doc, obj: dict, choices: set, where: str, also=()):
    present = [k for k in choices if k in obj]
    if len(present) != 1:
        raise doc.error(where, f"give exactly one of {', '.join(sorted(choices))}")
    return present[0]


def _number(doc, value, where, kind=float, lo=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise doc.error(where, "expected a number")
    if kind is int and not isinstance(value, int):
        raise doc.error(where, "expected an integer")
    if lo is not None and value < lo:
        raise doc.error(where, f"must be >= {lo}")
    return kind(value)


def parse_scenario(document, base_dir: str | os.PathLike = ".", source: str = "<scenario>"
                   ) -> Scenario:
    """Validate a scenario given as JSON text or an already-decoded dict."""
    text = None
    if isinstance(document, (str, bytes)):
        text = document.decode() if isinstance(document, bytes) else document
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}: malformed JSON: {exc.msg}") from None
    else:
        data = copy.deepcopy(document)
    doc = _Doc(text, source)
    _check_keys(doc, data, TOP_KEYS, "")
    if data.get("version") != SCENARIO_VERSION:
        raise doc.error("version", f"must be {SCENARIO_VERSION}")
    suite = data.get("suite")
    if suite not in SUITES:
        raise doc.error("suite", f"must be one of {', '.join(SUITES)}")
    name = data.get("name", suite)
    if not isinstance(name, str):
        raise doc.error("name", "expected a string")

    sc = Scenario(name=name, suite=suite, base_dir=str(base_dir))
    sc.tol = _number(doc, data.get("tol", sc.tol), "tol", lo=0)
    sc.iter_tol = _number(doc, data.get("iter_tol", sc.iter_tol), "iter_tol", lo=0)
    sc.n_max = _number(doc, data.get("n_max", sc.n_max), "n_max", int, lo=1)
    sc.seed = _number(doc, data.get("seed", sc.seed), "seed", int, lo=0)

    # structure
    if "structure" in data:
        spec = data["structure"]
        _check_keys(doc, spec, STRUCTURE_KEYS, "structure")
        _exactly_one(doc, spec, STRUCTURE_KEYS, "structure")
        sc.structure = spec
    elif suite != "baker":
        raise doc.error("structure", "required")
    try:
        G = sc.build_structure()
    except ConfigError as exc:
        raise doc.error("structure", str(exc)) from None
    except (KeyError, ValueError, TypeError) as exc:
        raise doc.error("structure", str(exc).strip("'\"")) from None

    # target
    if "target" in data:
        _check_keys(doc, data["target"], TARGET_KEYS, "target")
        sc.target = data["target"]
        try:
            S = sc.build_target()
        except (KeyError, ValueError) as exc:
            raise doc.error("target.kind", str(exc)) from None
    elif suite in NEEDS_MAP:
        raise doc.error("target", "required for this suite")
    else:
        S = None
    if suite == "superstability" and not S.is_algebra:
        raise doc.error("target", f"algebra required: {S.name} has no product")

    # map
    if "map" in data:
        spec = data["map"]
        _check_keys(doc, spec, MAP_KEYS, "map")
        if "hom" in spec or "perturbation" in spec:
            if set(spec) != {"hom", "perturbation"}:
                raise doc.error("map", "a perturbed map needs exactly 'hom' and 'perturbation'")
        else:
            _exactly_one(doc, spec, {"expr", "table", "table_file"}, "map")
        sc.map = spec
        _try_build(doc, "map", lambda: sc.build_map(G, S))
    elif suite in NEEDS_MAP:
        raise doc.error("map", "required for this suite")

    # control
    if "control" in data:
        spec = data["control"]
        _check_keys(doc, spec, CONTROL_KEYS, "control")
        _exactly_one(doc, spec, {"constant", "expr"}, "control")
        if "certificate" in spec:
            _check_keys(doc, spec["certificate"], CERT_KEYS, "control.certificate")
            for k in ("C", "lambda"):
                if k not in spec["certificate"]:
                    raise doc.error(f"control.certificate.{k}", "required")
        sc.control = spec
        _try_build(doc, "control", sc.build_control)
    elif suite == "stability":
        raise doc.error("control", "required for the stability suite")

    # probes
    if "probes" in data:
        spec = data["probes"]
        _check_keys(doc, spec, PROBE_KEYS, "probes")
        kind = _exactly_one(doc, spec, PROBE_KEYS - {"depth"}, "probes")
        if "depth" in spec and kind != "generators":
            raise doc.error("probes.depth", "only valid with generators")
        if kind == "exhaustive" and spec["exhaustive"] is not True:
            raise doc.error("probes.exhaustive", "must be true")
        if kind == "grid" and (not isinstance(spec["grid"], list) or len(spec["grid"]) != 3):
            raise doc.error("probes.grid", "expected [min, max, count]")
        sc.probes = spec
    elif suite != "baker" and not G.is_finite:
        raise doc.error("probes", f"required for the infinite carrier {G.name}")
    if suite != "baker":
        _try_build(doc, "probes", lambda: sc.build_probes(G))

    # params
    params = data.get("params", {})
    _check_keys(doc, params, PARAM_KEYS[suite], "params")
    sc.params = params
    _validate_params(doc, sc, G, S)

    if "output" in data:
        _check_keys(doc, data["output"], OUTPUT_KEYS, "output")
        sc.output = data["output"]
    return sc


def _try_build(doc: _Doc, where: str, build):
    try:
        return build()
    except ConfigError as exc:
        raise doc.error(where, str(exc)) from None
    except ExpressionError as exc:
        raise doc.error(where, f"expression does not parse: {exc}") from None
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        message = str(exc).strip("'\"")
        if "certificate" in message:
            where = f"{where}.certificate"
        raise doc.error(where, message) from None


def _validate_params(doc: _Doc, sc: Scenario, G, S):
    p = sc.params
    if sc.suite == "baker":
        if "epsilon" not in p:
            raise doc.error("params.epsilon", "required for the baker suite")
        _number(doc, p["epsilon"], "params.epsilon")
        if p["epsilon"] <= 0:
            raise doc.error("params.epsilon", "must be positive")
        _number(doc, p.get("triples", 100), "params.triples", int, lo=1)
    elif sc.suite == "lemma":
        _number(doc, p.get("draws", 1000), "params.draws", int, lo=1)
        if not G.is_finite:
            raise doc.error("structure", "the lemma suite needs a finite structure")
    elif sc.suite == "stability":
        _number(doc, p.get("series_length", 30), "params.series_length", int, lo=0)
        if "series_point" in p:
            _try_build(doc, "params.series_point", lambda: G.check(
                element_from_json(G, p["series_point"])))
    elif sc.suite == "superstability":
        if "growth_u" in p:
            _try_build(doc, "params.growth_u", lambda: G.check(element_from_json(G, p["growth_u"])))
            _number(doc, p.get("growth_n_max", 40), "params.growth_n_max", int, lo=1)
        if ("phi_map" in p) != ("alpha" in p):
            raise doc.error("params", "'phi_map' and 'alpha' go together")
        if "phi_map" in p:
            if S.kind not in ("complex", "real"):
                raise doc.error("params.phi_map", "the pair criterion needs a scalar target")
            _check_keys(doc, p["phi_map"], MAP_KEYS, "params.phi_map")
            _check_keys(doc, p["alpha"], CONTROL_KEYS, "params.alpha")
            _try_build(doc, "params.phi_map", lambda: sc.build_map(G, S, p["phi_map"]))
            _try_build(doc, "params.alpha",
                       lambda: sc.build_control(p["alpha"], ("y", "z")))


def _build_structure(spec: dict, sc: Scenario) -> TernaryStructure:
    if "name" in spec:
        return by_name(spec["name"])
    if "table_file" in spec:
        return read_table_file(sc.path(spec["table_file"]))
    if "ternary_table" in spec:
        t = spec["ternary_table"]
        return from_table(int(t["order"]), t["entries"])
    if "binary_table" in spec:
        return derive_from_binary(np.asarray(spec["binary_table"], dtype=np.int64))
    if "random_ternary" in spec:
        return random_table(int(spec["random_ternary"]), sc.rng(0))
    order = int(spec["random_associative"])
    return derive_from_binary(random_associative_binary(order, sc.rng(0)),
                              name=f"random-semigroup-{order}", claimed_associative=True)


def load_scenario(path: str | os.PathLike) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, base_dir=path.parent, source=str(path))


def bundled_scenarios() -> list[Path]:
    """Scenario files shipped with the package, in name order."""
    return sorted((Path(__file__).parent / "scenarios").glob("*.json"))


def serialize(sc: Scenario) -> str:
    """Canonical JSON text; ``parse_scenario(serialize(s)) == s``."""
    return json.dumps(sc.to_dict(), indent=2, sort_keys=True) + "\n"
