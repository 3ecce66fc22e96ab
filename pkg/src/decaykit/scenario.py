"""Scenario files: JSON schema, validation with line-precise errors, canonical cases.

A scenario is a JSON object. Structure is checked against :data:`SCHEMA`
(unknown keys are errors), then every value is pushed through the
constructors of the numerical modules so their invariants apply as well.
Errors name the offending field as a dotted path and, when the scenario came
from text, the line it sits on.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
import re
from dataclasses import dataclass
from typing import Any

import jsonschema
import numpy as np

from .contour import ContourSpec
from .errors import ScenarioError
from .quadrature import FrequencyDomain, QuadSpec, Strategy
from .smatrix import BlaschkePair, Mode, SMatrixModel
from .spectral import ResonanceParams, SpectralDensity
from .timedomain import TimeGrid

__all__ = [
    "SCHEMA",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "validate_scenario",
    "canonical_scenarios",
    "CANONICAL_NAME",
    "scenario_hash",
    "dumps_canonical",
]

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["t_min", "t_max", "points"],
    "properties": {
        "t_min": {"type": "number", "minimum": 0},
        "t_max": _POS,
        "points": {"type": "integer", "minimum": 1, "maximum": 1_000_000},
        "spacing": {"enum": ["linear", "log"]},
    },
}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["density", "domain", "time_grid"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "density": {
            "type": "object",
            "additionalProperties": False,
            "required": ["resonances"],
            "properties": {
                "resonances": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["omega0", "gamma"],
                        "properties": {"omega0": _NUM, "gamma": _POS, "weight": _POS},
                    },
                }
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["pairs"],
            "properties": {
                "mode": {"enum": [m.value for m in Mode]},
                "prefactor": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                "threshold_p": {"type": "integer"},
                "pairs": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["omega_n", "gamma_n"],
                        "properties": {"omega_n": _POS, "gamma_n": _POS},
                    },
                },
            },
        },
        "domain": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["FullLine", "HalfLine", "Interval"]},
                "a": _NUM,
                "b": _NUM,
            },
        },
        "time_grid": _GRID,
        "renormalize": {"type": "boolean"},
        "quad": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "abs_tol": _POS,
                "rel_tol": _POS,
                "max_subdivisions": {"type": "integer", "minimum": 1},
                "oscillatory_strategy": {"enum": [s.value for s in Strategy]},
            },
        },
        "omega_grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["w_min", "w_max", "points"],
            "properties": {
                "w_min": _NUM,
                "w_max": _NUM,
                "points": {"type": "integer", "minimum": 1, "maximum": 1_000_000},
            },
        },
        "contour": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "params"],
            "properties": {
                "kind": {"enum": ["Rectangle", "SemicircleUpper"]},
                "params": {"type": "array", "items": {"type": ["number", "null"]}},
                "samples": {"type": "integer", "minimum": 4},
            },
        },
        "tau_time": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cutoff": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "tail_tol": _POS,
                "grid": _GRID,
            },
        },
        "analysis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol": _POS,
                "gamma_ref": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "fit_window": {"type": ["array", "null"], "items": _NUM, "minItems": 2, "maxItems": 2},
            },
        },
        "outputs": {
            "type": "array",
            "items": {"enum": ["norm", "survival", "tau", "tau-time", "winding", "report"]},
            "uniqueItems": True,
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


# --------------------------------------------------------------------------
# Locating a field in the source text
# --------------------------------------------------------------------------

_DECODER = json.JSONDecoder()


def _skip_ws(text, pos):
    while pos < len(text) and text[pos] in " \t\r\n":
        pos += 1
    return pos


def _locate(text: str, path) -> int | None:
    """Line (1-based) of the value at ``path`` inside JSON ``text``.

    Walks the text with the stdlib decoder, skipping over sibling values.
    Returns the deepest line reachable if the path runs out early.
    """
    try:
        pos = _skip_ws(text, 0)
        for key in path:
            if pos >= len(text):
                break
            if text[pos] == "{":
                pos = _skip_ws(text, pos + 1)
                found = None
                while pos < len(text) and text[pos] != "}":
                    name, end = _DECODER.raw_decode(text, pos)
                    key_pos = pos
                    pos = _skip_ws(text, end)
                    pos = _skip_ws(text, pos + 1)  # ':'
                    if name == key:
                        found = (key_pos, pos)
                    _, end = _DECODER.raw_decode(text, pos)
                    if name == key:
                        break
                    pos = _skip_ws(text, end)
                    if text[pos] == ",":
                        pos = _skip_ws(text, pos + 1)
                if found is None:
                    break
                pos = found[1]
            elif text[pos] == "[" and isinstance(key, int):
                pos = _skip_ws(text, pos + 1)
                for _ in range(key):
                    _, end = _DECODER.raw_decode(text, pos)
                    pos = _skip_ws(text, end)
                    pos = _skip_ws(text, pos + 1)
            else:
                break
        return text.count("\n", 0, pos) + 1
    except (ValueError, IndexError):
        return None


def _dotted(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ScenarioError(f"duplicate key {k!r}", field=k)
        seen[k] = v
    return seen


# --------------------------------------------------------------------------
# Scenario object
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    data: dict
    density: SpectralDensity
    model: SMatrixModel
    domain: FrequencyDomain
    grid: TimeGrid
    quad: QuadSpec

    @property
    def name(self) -> str:
        return self.data.get("name", "")

    @property
    def hash(self) -> str:
        return scenario_hash(self.data)

    def omega_grid(self) -> np.ndarray:
        g = self.data["omega_grid"]
        return np.linspace(g["w_min"], g["w_max"], g["points"])

    def contour(self) -> ContourSpec:
        c = self.data["contour"]
        return ContourSpec(c["kind"], tuple(c["params"]), c["samples"])

    def tau_grid(self) -> TimeGrid:
        return _grid(self.data["tau_time"]["grid"])

    def with_overrides(self, tol: float | None = None) -> "Scenario":
        if tol is None:
            return self
        data = copy.deepcopy(self.data)
        data["quad"]["abs_tol"] = tol
        data["quad"]["rel_tol"] = tol
        return validate_scenario(data)


def _grid(g) -> TimeGrid:
    if g["spacing"] == "log":
        return TimeGrid.log(g["t_min"], g["t_max"], g["points"])
    return TimeGrid.linear(g["t_min"], g["t_max"], g["points"])


def _normalise(raw: dict) -> dict:
    """Fill defaults so the stored scenario is explicit and re-validatable."""
    data = copy.deepcopy(raw)
    data.setdefault("name", "")
    data.setdefault("description", "")
    res = data["density"]["resonances"]
    if len(res) == 1:
        res[0].setdefault("weight", 1.0)
    data.setdefault("renormalize", False)
    q = data.setdefault("quad", {})
    defaults = QuadSpec()
    q.setdefault("abs_tol", defaults.abs_tol)
    q.setdefault("rel_tol", defaults.rel_tol)
    q.setdefault("max_subdivisions", defaults.max_subdivisions)
    q.setdefault("oscillatory_strategy", defaults.oscillatory_strategy.value)
    data["time_grid"].setdefault("spacing", "linear")
    if "model" not in data:
        pairs = [{"omega_n": r["omega0"], "gamma_n": r["gamma"]} for r in res if r["omega0"] > 0]
        data["model"] = {"pairs": pairs, "mode": Mode.POLE_ONLY.value}
    m = data["model"]
    m.setdefault("mode", Mode.UNITARY_PAIR.value)
    m.setdefault("prefactor", [1.0, 0.0])
    m.setdefault("threshold_p", 0)
    gmin = min(r["gamma"] for r in res)
    top = max(abs(r["omega0"]) + r["gamma"] for r in res)
    data.setdefault("omega_grid", {"w_min": -2.0 * top, "w_max": 2.0 * top, "points": 401})
    if "contour" not in data and m["pairs"]:
        big = 2.0 * max(p["omega_n"] + p["gamma_n"] for p in m["pairs"])
        data["contour"] = {"kind": "Rectangle", "params": [-big, big, 0.0, big]}
    if "contour" in data:
        data["contour"].setdefault("samples", 256)
    tt = data.setdefault("tau_time", {})
    tt.setdefault("cutoff", None)
    tt.setdefault("tail_tol", 1e-3)
    tt.setdefault("grid", {"t_min": 0.1 / gmin, "t_max": 10.0 / gmin, "points": 21, "spacing": "log"})
    tt["grid"].setdefault("spacing", "linear")
    an = data.setdefault("analysis", {})
    an.setdefault("tol", 1e-6)
    an.setdefault("gamma_ref", None)
    an.setdefault("fit_window", None)
    data.setdefault("outputs", [])
    return data


def _build(data: dict, locate) -> Scenario:
    def fail(msg, *path):
        raise ScenarioError(msg, field=_dotted(path), line=locate(path))

    res = data["density"]["resonances"]
    if len(res) > 1 and any("weight" not in r for r in res):
        i = next(i for i, r in enumerate(res) if "weight" not in r)
        fail("every resonance of a mixture needs an explicit weight", "density", "resonances", i)
    resonances = []
    for i, r in enumerate(res):
        try:
            resonances.append(ResonanceParams(r["omega0"], r["gamma"]))
        except ValueError as e:
            fail(str(e), "density", "resonances", i)
    try:
        density = SpectralDensity(resonances, [r["weight"] for r in res])
    except ValueError as e:
        fail(str(e), "density", "resonances")

    m = data["model"]
    if not m["pairs"]:
        fail("no resonance has omega0 > 0, so no model can be derived; give one explicitly", "model")
    pairs = []
    for i, p in enumerate(m["pairs"]):
        try:
            pairs.append(BlaschkePair(p["omega_n"], p["gamma_n"]))
        except ValueError as e:
            fail(str(e), "model", "pairs", i)
    if m["threshold_p"] != 0:
        fail("only threshold_p = 0 is supported", "model", "threshold_p")
    try:
        model = SMatrixModel(pairs, Mode(m["mode"]), complex(*m["prefactor"]), m["threshold_p"])
    except ValueError as e:
        key = "prefactor" if "prefactor" in str(e) else "pairs"
        fail(str(e), "model", key)

    d = data["domain"]
    kind = d["kind"]
    if kind == "Interval":
        for k in ("a", "b"):
            if k not in d:
                fail("Interval needs both 'a' and 'b'", "domain")
        try:
            domain = FrequencyDomain.interval(d["a"], d["b"])
        except ValueError as e:
            fail(str(e), "domain", "b")
    else:
        extra = [k for k in ("a", "b") if k in d]
        if extra:
            fail(f"{kind} takes no bounds", "domain", extra[0])
        domain = FrequencyDomain.full_line() if kind == "FullLine" else FrequencyDomain.half_line()

    for section in (("time_grid",), ("tau_time", "grid")):
        g = data
        for k in section:
            g = g[k]
        if g["t_max"] <= g["t_min"]:
            fail("t_max must exceed t_min", *section, "t_max")
        if g["points"] < 2:
            fail("a grid needs at least 2 points", *section, "points")
        if g["spacing"] == "log" and g["t_min"] <= 0:
            fail("log spacing needs t_min > 0", *section, "t_min")
    grid = _grid(data["time_grid"])
    if data["tau_time"]["grid"]["t_min"] <= 0:
        fail("t = 0 has no contour closure; start the grid above 0", "tau_time", "grid", "t_min")

    q = data["quad"]
    quad = QuadSpec(q["abs_tol"], q["rel_tol"], q["max_subdivisions"], Strategy(q["oscillatory_strategy"]))

    og = data["omega_grid"]
    if og["w_max"] <= og["w_min"] and og["points"] > 1:
        fail("w_max must exceed w_min", "omega_grid", "w_max")

    if "contour" in data:
        c = data["contour"]
        n = 4 if c["kind"] == "Rectangle" else 2
        if len(c["params"]) != n:
            fail(f"{c['kind']} takes {n} params", "contour", "params")
        if c["kind"] == "Rectangle" and any(v is None for v in c["params"]):
            fail("rectangle corners must be numbers", "contour", "params")
        try:
            ContourSpec(c["kind"], tuple(c["params"]), c["samples"])
        except ValueError as e:
            fail(str(e), "contour", "params")

    cutoff = data["tau_time"]["cutoff"]
    if cutoff is not None:
        top = max(p.omega_n + p.gamma_n for p in pairs)
        if cutoff <= top:
            fail(f"cutoff must exceed max(omega_n + gamma_n) = {top}", "tau_time", "cutoff")
    fw = data["analysis"]["fit_window"]
    if fw is not None and not fw[0] < fw[1]:
        fail("fit_window must be increasing", "analysis", "fit_window")
    return Scenario(data, density, model, domain, grid, quad)


def _schema_check(raw, locate):
    errors = sorted(_VALIDATOR.iter_errors(raw), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if not errors:
        return
    e = errors[0]
    path = list(e.absolute_path)
    if e.validator == "additionalProperties":
        known = set(e.schema.get("properties", {}))
        unknown = sorted(k for k in e.instance if k not in known)
        path = path + [unknown[0]]
        raise ScenarioError(f"unknown key {unknown[0]!r} (allowed: {', '.join(sorted(known))})",
                            field=_dotted(path), line=locate(path))
    raise ScenarioError(e.message, field=_dotted(path), line=locate(path))


def _finite_check(obj, path, locate):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _finite_check(v, path + [k], locate)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _finite_check(v, path + [i], locate)
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise ScenarioError("value must be finite", field=_dotted(path), line=locate(path))


def validate_scenario(raw: Any, text: str | None = None) -> Scenario:
    """Validate a decoded scenario; ``text`` (the source) enables line numbers."""
    locate = (lambda path: _locate(text, path)) if text is not None else (lambda path: None)
    if not isinstance(raw, dict):
        raise ScenarioError("a scenario must be a JSON object", line=1 if text is not None else None)
    _finite_check(raw, [], locate)
    _schema_check(raw, locate)
    data = _normalise(raw)
    # the filled-in document must still satisfy the schema (round trip)
    _schema_check(data, lambda path: None)
    return _build(data, locate)


def parse_scenario(text: str) -> Scenario:
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e.msg} (column {e.colno})", line=e.lineno) from None
    except ScenarioError as e:
        # duplicate key: point at its second spelling in the text
        hits = [m.start() for m in re.finditer(re.escape(json.dumps(e.field)) + r"\s*:", text)]
        line = text.count("\n", 0, hits[1]) + 1 if len(hits) > 1 else None
        raise ScenarioError(f"duplicate key {e.field!r}", field=e.field, line=line) from None
    return validate_scenario(raw, text)


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {path}: {e.strerror}") from None
    return parse_scenario(text)


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def scenario_hash(data: dict) -> str:
    return hashlib.sha256(dumps_canonical(data).encode()).hexdigest()


CANONICAL_NAME = "single-resonance"


def canonical_scenarios() -> dict[str, dict]:
    """The single-resonance cases shared by the docs and the test suite."""
    return {
        "single-resonance": {
            "name": "single-resonance",
            "description": "omega0 = 5, Gamma = 1 on the half-line; the Khalfin tail sets in near t = 15",
            "density": {"resonances": [{"omega0": 5.0, "gamma": 1.0}]},
            "model": {"mode": "UnitaryPair", "pairs": [{"omega_n": 5.0, "gamma_n": 1.0}]},
            "domain": {"kind": "HalfLine"},
            "time_grid": {"t_min": 0.01, "t_max": 10000.0, "points": 241, "spacing": "log"},
            "contour": {"kind": "Rectangle", "params": [-10.0, 10.0, 0.0, 10.0]},
            "analysis": {"tol": 0.05, "fit_window": [1.0, 10.0]},
            "outputs": ["report"],
        },
        "full-line": {
            "name": "full-line",
            "description": "omega0 = 5, Gamma = 1 over the whole real line: pure exponential decay",
            "density": {"resonances": [{"omega0": 5.0, "gamma": 1.0}]},
            "domain": {"kind": "FullLine"},
            "time_grid": {"t_min": 0.0, "t_max": 20.0, "points": 41, "spacing": "linear"},
            "outputs": ["norm", "survival"],
        },
        "half-line-norm": {
            "name": "half-line-norm",
            "description": "omega0 = 1, Gamma = 2 on the half-line: norm 3/4",
            "density": {"resonances": [{"omega0": 1.0, "gamma": 2.0}]},
            "domain": {"kind": "HalfLine"},
            "time_grid": {"t_min": 0.0, "t_max": 10.0, "points": 11},
            "outputs": ["norm"],
        },
        "single-pole": {
            "name": "single-pole",
            "description": "one pole at 5 - 0.5i: delay 2/Gamma at the peak",
            "density": {"resonances": [{"omega0": 5.0, "gamma": 1.0}]},
            "model": {"mode": "PoleOnly", "pairs": [{"omega_n": 5.0, "gamma_n": 1.0}]},
            "domain": {"kind": "FullLine"},
            "time_grid": {"t_min": 0.0, "t_max": 10.0, "points": 11},
            "omega_grid": {"w_min": 0.0, "w_max": 10.0, "points": 101},
            "contour": {"kind": "Rectangle", "params": [3.0, 7.0, -2.0, 2.0]},
            "outputs": ["tau", "winding"],
        },
        "two-pairs": {
            "name": "two-pairs",
            "description": "two unitary pairs; residue and transform routes for tau(t)",
            "density": {"resonances": [{"omega0": 2.0, "gamma": 0.5, "weight": 0.5},
                                       {"omega0": 6.0, "gamma": 1.0, "weight": 0.5}]},
            "model": {"mode": "UnitaryPair", "pairs": [{"omega_n": 2.0, "gamma_n": 0.5},
                                                       {"omega_n": 6.0, "gamma_n": 1.0}]},
            "domain": {"kind": "HalfLine"},
            "time_grid": {"t_min": 0.01, "t_max": 1000.0, "points": 101, "spacing": "log"},
            "outputs": ["tau-time", "winding"],
        },
    }
