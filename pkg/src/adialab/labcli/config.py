"""Scenario configuration: YAML in, validated dataclasses out, YAML back."""

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .. import models
from ..diagnostics import ALL_DIAGNOSTICS

DEFAULT_TOLERANCES = {
    "norm": 1e-8,
    "probability_sum": 1e-8,
    "amplitude_sum": 1e-6,
    "quadrature": 1e-3,
    "gap_tol": 1e-8,
    "cutoff_fraction": 0.01,
    "phase_bound": 0.1,
    "phase_resolution": 0.3,
}

# name -> (required params, optional params with defaults, description)
MODEL_SCHEMAS = {
    "driven_two_level": (
        ["eps", "V", "omega0"], {},
        "-(eps/2) sigma_z - V sin(omega0 t) sigma_x; all parameters > 0",
    ),
    "rotating_field": (
        ["eps"], {"turns": 1},
        "-(eps/2)[cos(theta) sigma_z + sin(theta) sigma_x], theta = 2 pi turns t / T; eps > 0, turns >= 1",
    ),
    "linear_interpolation": (
        [], {"H0": None, "H1": None, "H0_file": None, "H1_file": None},
        "(1 - t/T) H0 + (t/T) H1; give each endpoint inline (rows of numbers or [re, im] pairs) "
        "or as H0_file/H1_file (.npy or whitespace-separated text)",
    ),
    "grover_adiabatic": (
        ["n_qubits"], {"marked": 0},
        "(1-s)(I - |u><u|) + s(I - |m><m|); n_qubits in 1..6, marked < 2**n_qubits",
    ),
    "dual_of": (
        ["base"], {"grid_points": None},
        "-U^dagger H U for a wrapped base model {name, params}; base may not itself be dual_of; "
        "grid_points defaults to steps + 1",
    ),
}


class ConfigError(ValueError):
    pass


@dataclass
class ModelSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class ScenarioConfig:
    name: str
    model: ModelSpec
    total_time: float
    steps: int
    initial_state: dict = field(default_factory=lambda: {"level": 0})
    diagnostics: list = field(default_factory=lambda: list(ALL_DIAGNOSTICS))
    pairs: Optional[list] = None
    sweep: Optional[list] = None
    output_dir: str = "out"
    tolerances: dict = field(default_factory=dict)
    companion_dual: bool = False
    timeseries_stride: Optional[int] = None
    min_time_steps: int = 2000
    expect: dict = field(default_factory=dict)
    base_dir: str = field(default=".", compare=False, repr=False)

    def tolerance(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self):
        d = asdict(self)
        d.pop("base_dir")
        return d


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _model_spec(raw, where="model"):
    _require(isinstance(raw, dict), f"{where} must be a mapping with 'name' and 'params'")
    name = raw.get("name")
    _require(name in MODEL_SCHEMAS, f"{where}.name must be one of {sorted(MODEL_SCHEMAS)}, got {name!r}")
    params = raw.get("params") or {}
    _require(isinstance(params, dict), f"{where}.params must be a mapping")
    required, optional, _ = MODEL_SCHEMAS[name]
    missing = [k for k in required if k not in params]
    _require(not missing, f"{where}: missing parameters {missing} for {name}")
    unknown = sorted(set(params) - set(required) - set(optional))
    _require(not unknown, f"{where}: unknown parameters {unknown} for {name}")
    if name == "dual_of":
        base = _model_spec(params["base"], where=f"{where}.params.base")
        _require(base.name != "dual_of", f"{where}: dual_of cannot wrap another dual_of")
        params = dict(params, base={"name": base.name, "params": base.params})
    if name == "linear_interpolation":
        for end in ("H0", "H1"):
            _require((params.get(end) is None) != (params.get(f"{end}_file") is None),
                     f"{where}: give exactly one of {end} or {end}_file")
    return ModelSpec(name, dict(params))


def from_dict(raw, base_dir="."):
    """Validate a parsed YAML mapping into a :class:`ScenarioConfig`."""
    _require(isinstance(raw, dict), "config must be a mapping")
    known = {f for f in ScenarioConfig.__dataclass_fields__ if f != "base_dir"}
    unknown = sorted(set(raw) - known)
    _require(not unknown, f"unknown config keys {unknown}")
    for key in ("name", "model", "total_time", "steps"):
        _require(key in raw, f"missing required key '{key}'")
    name = raw["name"]
    _require(isinstance(name, str) and name and "/" not in name, "name must be a non-empty string without '/'")
    model = _model_spec(raw["model"])
    T = raw["total_time"]
    _require(isinstance(T, (int, float)) and not isinstance(T, bool) and math.isfinite(T) and T > 0,
             f"total_time must be a positive number, got {T!r}")
    steps = raw["steps"]
    _require(isinstance(steps, int) and not isinstance(steps, bool) and steps >= 1,
             f"steps must be a positive integer, got {steps!r}")

    init = raw.get("initial_state", {"level": 0})
    _require(isinstance(init, dict) and len(init) == 1 and set(init) <= {"level", "amplitudes"},
             "initial_state must be {level: int} or {amplitudes: [...]}")
    if "level" in init:
        _require(isinstance(init["level"], int) and init["level"] >= 0, "initial_state.level must be a non-negative integer")

    diags = raw.get("diagnostics", list(ALL_DIAGNOSTICS))
    _require(isinstance(diags, list) and set(diags) <= set(ALL_DIAGNOSTICS),
             f"diagnostics must be a list drawn from {list(ALL_DIAGNOSTICS)}")

    pairs = raw.get("pairs")
    if pairs is not None:
        _require(isinstance(pairs, list) and pairs and all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(i, int) and i >= 0 for i in p) and p[0] != p[1]
            for p in pairs), "pairs must be a list of [n, m] with n != m")

    sweep = raw.get("sweep")
    if sweep is not None:
        _require(isinstance(sweep, list) and sweep, "sweep must be a non-empty list of times")
        _require(all(isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0 for x in sweep),
                 "sweep entries must be positive numbers")
        _require(all(a < b for a, b in zip(sweep, sweep[1:])), "sweep must be strictly ascending")

    tols = raw.get("tolerances") or {}
    _require(isinstance(tols, dict) and set(tols) <= set(DEFAULT_TOLERANCES),
             f"tolerances keys must be drawn from {sorted(DEFAULT_TOLERANCES)}")
    stride = raw.get("timeseries_stride")
    _require(stride is None or (isinstance(stride, int) and stride >= 1), "timeseries_stride must be a positive integer")
    expect = raw.get("expect") or {}
    _require(isinstance(expect, dict), "expect must be a mapping of report key -> {min, max}")
    for key, bounds in expect.items():
        _require(isinstance(bounds, dict) and bounds and set(bounds) <= {"min", "max"},
                 f"expect.{key} must be a mapping with 'min' and/or 'max'")
    mts = raw.get("min_time_steps", 2000)
    _require(isinstance(mts, int) and mts >= 2, "min_time_steps must be an integer >= 2")

    return ScenarioConfig(
        name=name, model=model, total_time=float(T), steps=steps, initial_state=dict(init),
        diagnostics=list(diags), pairs=pairs, sweep=[float(x) for x in sweep] if sweep else None,
        output_dir=str(raw.get("output_dir", "out")), tolerances=dict(tols),
        companion_dual=bool(raw.get("companion_dual", False)), timeseries_stride=stride,
        min_time_steps=mts, expect=dict(expect), base_dir=str(base_dir),
    )


def load(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return from_dict(raw, base_dir=path.parent)


def dump(cfg):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=None)


def parse_entry(x):
    if isinstance(x, (list, tuple)):
        _require(len(x) == 2, f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def parse_matrix(rows):
    try:
        m = np.array([[parse_entry(x) for x in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse matrix: {exc}") from exc
    _require(m.ndim == 2 and m.shape[0] == m.shape[1], f"matrix must be square, got shape {m.shape}")
    return m


def load_matrix(path, base_dir):
    p = Path(path)
    if not p.is_absolute():
        p = Path(base_dir) / p
    try:
        if p.suffix == ".npy":
            return parse_matrix(np.load(p).tolist())
        lines = [ln.replace(",", " ").split() for ln in p.read_text(encoding="utf-8").splitlines()]
        return parse_matrix([ln for ln in lines if ln and not ln[0].startswith("#")])
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {p}: {exc}") from exc


def build_model(spec, total_time, steps, base_dir="."):
    """Instantiate the model described by ``spec`` with duration ``total_time``."""
    p = spec.params
    if spec.name == "driven_two_level":
        return models.driven_two_level(models.DrivenTwoLevelParams(p["eps"], p["V"], p["omega0"]), total_time)
    if spec.name == "rotating_field":
        return models.rotating_field(p["eps"], total_time, p.get("turns", 1))
    if spec.name == "linear_interpolation":
        ends = []
        for end in ("H0", "H1"):
            if p.get(end) is not None:
                ends.append(parse_matrix(p[end]))
            else:
                ends.append(load_matrix(p[f"{end}_file"], base_dir))
        return models.linear_interpolation(ends[0], ends[1], total_time)
    if spec.name == "grover_adiabatic":
        return models.grover_adiabatic(p["n_qubits"], p.get("marked", 0), total_time)
    if spec.name == "dual_of":
        base = build_model(ModelSpec(p["base"]["name"], p["base"].get("params") or {}), total_time, steps, base_dir)
        grid = p.get("grid_points") or steps + 1
        return models.dual_of(base, grid)
    raise ConfigError(f"unknown model {spec.name!r}")  # pragma: no cover


def describe_models():
    """Human-readable listing of every constructible model."""
    lines = []
    for name, (required, optional, desc) in MODEL_SCHEMAS.items():
        lines.append(name)
        lines.append(f"    {desc}")
        lines.append(f"    required: {', '.join(required) if required else '(none)'}")
        opts = ", ".join(f"{k}={v}" for k, v in optional.items() if v is not None)
        opts_nodef = ", ".join(k for k, v in optional.items() if v is None)
        lines.append(f"    optional: {', '.join(x for x in (opts, opts_nodef) if x) or '(none)'}")
    lines.append("All models also take total_time (top-level config key).")
    return "\n".join(lines) + "\n"
