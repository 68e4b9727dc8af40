"""TOML run configuration with validated defaults."""

from __future__ import annotations

import hashlib
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError
from .materials import AnchorModel, DesignParams, Material

# Section -> key -> default.  Geometry is in metres.
DEFAULTS = {
    "material": {
        "e_ref": 1.61e11,
        "rho": 2330.0,
        "tce_per_c": -7.406e-6,
        "cte_per_c": 2.4e-6,
        "t_ref_c": 25.0,
    },
    "geometry": {
        "l2": 560e-6,
        "w_res": 2e-6,
        "l1": 540e-6,
        "w_comp": 40e-6,
        "t": 20e-6,
        "comp_porosity": 0.25,
        "porosity_exponent": 3.0,
        "truss_length": 100e-6,
        "truss_width": 8e-6,
        "wing_mass_kg": 0.0,
        "wing_inertia": 0.0,
    },
    "anchors": {"model": "rigid", "cte_sub_per_c": None},
    "analysis": {
        "t_min_c": -40.0,
        "t_max_c": 80.0,
        "n_temperatures": 7,
        "elements_per_beam": 16,
        "n_modes": 6,
    },
    "optimize": {
        "ratio_min": 0.90,
        "ratio_max": 1.00,
        "tol_ratio": 1e-5,
        "tol_tcf_ppm": 0.5,
    },
}

POSITIVE = {
    "material.e_ref", "material.rho",
    "geometry.l2", "geometry.w_res", "geometry.l1", "geometry.w_comp", "geometry.t",
    "geometry.truss_length", "geometry.truss_width",
    "optimize.tol_ratio", "optimize.tol_tcf_ppm",
}
NON_NEGATIVE = {"geometry.wing_mass_kg", "geometry.wing_inertia"}
INTEGERS = {"analysis.n_temperatures", "analysis.elements_per_beam", "analysis.n_modes"}


@dataclass(frozen=True)
class AnalysisSettings:
    t_min: float = -40.0
    t_max: float = 80.0
    n_temperatures: int = 7
    elements_per_beam: int = 16
    n_modes: int = 6

    @property
    def t_range(self):
        return (self.t_min, self.t_max)


@dataclass(frozen=True)
class OptimizeSettings:
    ratio_min: float = 0.90
    ratio_max: float = 1.00
    tol_ratio: float = 1e-5
    tol_tcf: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    material: Material
    design: DesignParams
    analysis: AnalysisSettings
    optimize: OptimizeSettings
    values: dict  # resolved dotted-key values, used for hashing

    @property
    def digest(self) -> str:
        blob = json.dumps(self.values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = ""
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[\s*([^\]]+?)\s*\]", s)
        if m:
            current = m.group(1)
            if key is None and current == section:
                return no
            continue
        if key is None:
            continue
        if current == section and re.match(rf"^{re.escape(key)}\s*=", s):
            return no
        if current == "" and re.match(rf"^{re.escape(section)}\.{re.escape(key)}\s*=", s):
            return no
    return None


def _fail(text, section, key, msg):
    line = _line_of(text, section, key)
    where = f" (line {line})" if line else ""
    name = f"{section}.{key}" if key else section
    raise ConfigurationError(f"{name}{where}: {msg}")


def load_config_text(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"cannot parse config: {exc}") from None

    values = {}
    for section, entries in raw.items():
        if section not in DEFAULTS:
            _fail(text, section, None, "unknown section")
        if not isinstance(entries, dict):
            _fail(text, section, None, "expected a table")
        for key in entries:
            if key not in DEFAULTS[section]:
                _fail(text, section, key, "unknown key")

    for section, keys in DEFAULTS.items():
        given = raw.get(section, {})
        for key, default in keys.items():
            v = given.get(key, default)
            name = f"{section}.{key}"
            if section == "anchors":
                values[name] = v
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                _fail(text, section, key, f"expected a number, got {v!r}")
            if name in INTEGERS:
                if int(v) != v:
                    _fail(text, section, key, f"expected an integer, got {v!r}")
                v = int(v)
            else:
                v = float(v)
            if not math.isfinite(v):
                _fail(text, section, key, "must be finite")
            if name in POSITIVE and not v > 0:
                _fail(text, section, key, f"must be > 0, got {v}")
            if name in NON_NEGATIVE and v < 0:
                _fail(text, section, key, f"must be >= 0, got {v}")
            values[name] = v

    def check(cond, section, key, msg):
        if not cond:
            _fail(text, section, key, msg)

    g = lambda k: values[f"geometry.{k}"]  # noqa: E731
    a = lambda k: values[f"analysis.{k}"]  # noqa: E731
    o = lambda k: values[f"optimize.{k}"]  # noqa: E731
    check(g("l1") <= g("l2"), "geometry", "l1", f"l1 ({g('l1')}) must not exceed l2 ({g('l2')})")
    check(0.0 <= g("comp_porosity") < 1.0, "geometry", "comp_porosity", "must be in [0, 1)")
    check(g("porosity_exponent") >= 1.0, "geometry", "porosity_exponent", "must be >= 1")
    check(a("t_max_c") > a("t_min_c"), "analysis", "t_max_c", "must exceed t_min_c")
    check(a("n_temperatures") >= 3, "analysis", "n_temperatures", "must be >= 3")
    check(
        a("elements_per_beam") >= 4 and a("elements_per_beam") % 2 == 0,
        "analysis", "elements_per_beam", "must be an even integer >= 4",
    )
    check(a("n_modes") >= 1, "analysis", "n_modes", "must be >= 1")
    check(0.0 < o("ratio_min") < o("ratio_max") <= 1.0, "optimize", "ratio_min",
          "need 0 < ratio_min < ratio_max <= 1")

    model = values["anchors.model"]
    check(model in ("rigid", "substrate"), "anchors", "model", f"expected 'rigid' or 'substrate', got {model!r}")
    cte_sub = values["anchors.cte_sub_per_c"]
    if model == "substrate":
        check(cte_sub is not None, "anchors", "cte_sub_per_c", "required when model = 'substrate'")
    if cte_sub is not None:
        check(isinstance(cte_sub, (int, float)) and not isinstance(cte_sub, bool)
              and math.isfinite(cte_sub), "anchors", "cte_sub_per_c", "expected a finite number")
        values["anchors.cte_sub_per_c"] = cte_sub = float(cte_sub)
    anchors = AnchorModel.substrate(cte_sub) if model == "substrate" else AnchorModel.rigid()

    mat = Material(
        e_ref=values["material.e_ref"],
        rho=values["material.rho"],
        tce=values["material.tce_per_c"],
        cte=values["material.cte_per_c"],
        t_ref=values["material.t_ref_c"],
    )
    for key in ("t_min_c", "t_max_c"):
        check(abs(mat.tce * (a(key) - mat.t_ref)) < 0.1, "analysis", key,
              "outside the linear modulus domain of the material")
    design = DesignParams(
        l2=g("l2"), w_res=g("w_res"), l1=g("l1"), w_comp=g("w_comp"), thickness=g("t"),
        comp_porosity=g("comp_porosity"), porosity_exponent=g("porosity_exponent"),
        truss_length=g("truss_length"), truss_width=g("truss_width"),
        wing_mass=g("wing_mass_kg"), wing_inertia=g("wing_inertia"), anchor_model=anchors,
    )
    analysis = AnalysisSettings(a("t_min_c"), a("t_max_c"), a("n_temperatures"),
                                a("elements_per_beam"), a("n_modes"))
    optimize = OptimizeSettings(o("ratio_min"), o("ratio_max"), o("tol_ratio"), o("tol_tcf_ppm"))
    return RunConfig(mat, design, analysis, optimize, values)


def parse_config(path) -> RunConfig:
    """Read and validate a TOML config file; ``None`` gives all defaults."""
    if path is None:
        return load_config_text("")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return load_config_text(text)
