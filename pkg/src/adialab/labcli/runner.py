"""Model -> evolve -> diagnose pipelines behind the ``run`` and ``sweep`` commands."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import models
from ..diagnostics import diagnose, gap_profile, grover_selection_rule, spectrum_path
from ..diagnostics.report import pair_key
from ..diagnostics.spectrum import projections
from ..errors import DimMismatch, InvalidParams
from ..propagate import evolve
from . import reportio
from .config import ConfigError, build_model, parse_entry

log = logging.getLogger(__name__)

REPORT_FORMAT = "adialab-run-report/1"
SWEEP_DIAGNOSTICS = ("amplitudes", "adiabatic_error", "zero_count", "fourier")


@dataclass
class RunResult:
    report: dict
    files: list

    @property
    def passed(self):
        return self.report["passed"]


def initial_state(cfg, path):
    """State at ``t = 0`` from ``initial_state`` in the config."""
    init = cfg.initial_state
    d = path.dim
    if "level" in init:
        if init["level"] >= d:
            raise InvalidParams(f"initial_state.level = {init['level']} but the model has dim {d}")
        return path.vectors[0][:, init["level"]].copy()
    try:
        psi = np.array([parse_entry(x) for x in init["amplitudes"]], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"initial_state.amplitudes: {exc}") from exc
    if psi.shape != (d,):
        raise DimMismatch(f"initial_state.amplitudes has {psi.size} entries, model dim is {d}")
    return psi


def _check(value, tol, *, upper=True):
    value = float(value)
    return {"value": value, "tolerance": float(tol), "passed": bool(value <= tol) if upper else bool(value >= tol)}


def _invariants(cfg, trace, path, rep):
    inv = {}
    norms = np.linalg.norm(trace.states, axis=1)
    inv["norm_conservation"] = _check(np.max(np.abs(norms - 1)), cfg.tolerance("norm"))
    if rep.level_probabilities is not None:
        p = rep.level_probabilities
        inv["probability_completeness"] = _check(np.max(np.abs(p.sum(axis=1) - 1)), cfg.tolerance("probability_sum"))
        inv["probability_range"] = _check(np.max(p) - 1, 1e-9)
    if rep.amplitudes is not None:
        s = np.sum(np.abs(rep.amplitudes) ** 2, axis=1)
        inv["amplitude_completeness"] = _check(np.max(np.abs(s - 1)), cfg.tolerance("amplitude_sum"))
    if rep.eps_m is not None:
        for m, eps in rep.eps_m.items():
            if rep.eps_m_complete[m]:
                inv[f"quadrature_consistency:{m}"] = _check(abs(eps - rep.error_direct[m]), cfg.tolerance("quadrature"))
    if rep.eps_nm is not None and rep.zero_count_bound is not None:
        for key, eps in rep.eps_nm.items():
            bound = rep.zero_count_bound[key]
            inv[f"bound_validity:{key}"] = {"value": abs(eps), "tolerance": bound, "passed": bool(abs(eps) <= bound)}
    return inv


def _lookup(report, dotted):
    node = report
    for part in dotted.split("."):
        if isinstance(node, dict) and part in node:
            node = node[part]
        elif isinstance(node, list) and part.lstrip("-").isdigit() and -len(node) <= int(part) < len(node):
            node = node[int(part)]
        else:
            return None
    return node


def evaluate_expectations(expect, report):
    out = {}
    for key, bounds in sorted(expect.items()):
        value = _lookup(report, key)
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and "min" in bounds:
            ok = value >= bounds["min"]
        if ok and "max" in bounds:
            ok = value <= bounds["max"]
        out[key] = {"value": value if isinstance(value, (int, float)) else None,
                    "passed": bool(ok), **{k: float(v) for k, v in bounds.items()}}
    return out


def timeseries_csv(trace, path, rep, stride):
    d = path.dim
    idx = np.arange(0, len(path.times), stride)
    if idx[-1] != len(path.times) - 1:
        idx = np.append(idx, len(path.times) - 1)
    proj = projections(trace, path)
    cols = [path.times[idx]]
    header = ["t"]
    cols += [np.abs(proj[idx, n]) ** 2 for n in range(d)]
    header += [f"P_{n}" for n in range(d)]
    cols += [np.abs(proj[idx, n]) for n in range(d)]  # |a_n| = |<E_n|psi>|
    header += [f"abs_a_{n}" for n in range(d)]
    for (n, m), a in sorted(rep.a_nm.items()):
        cols += [a.live[idx].real, a.live[idx].imag]
        header += [f"re_A_{n}_{m}", f"im_A_{n}_{m}"]
    rows = zip(*(c.tolist() for c in cols))
    return reportio.csv_table(header, rows)


def _grover_checks(model, s_steps=10000):
    s, gaps = gap_profile(model, s_steps)
    k = int(np.argmin(gaps))
    return {"selection_rule_residual": grover_selection_rule(model, np.linspace(0.1, 0.9, 81)),
            "min_gap": float(gaps[k]), "min_gap_s": float(s[k])}


def run_model(cfg, model, timing=False):
    """Evolve ``model`` and assemble the report dict plus the time-series text."""
    started = time.perf_counter()
    pairs = [tuple(p) for p in cfg.pairs] if cfg.pairs else None
    for p in pairs or ():
        if max(p) >= model.dim:
            raise InvalidParams(f"pair {list(p)} out of range for dim {model.dim}")
    gap_tol = cfg.tolerance("gap_tol")
    log.info("spectrum path for %s, %d steps", model.label, cfg.steps)
    path = spectrum_path(model, cfg.steps, gap_tol)
    psi0 = initial_state(cfg, path)
    log.info("evolving %s", model.label)
    trace = evolve(model, psi0, cfg.steps, phase_bound=cfg.tolerance("phase_bound"))
    level = cfg.initial_state.get("level", 0)
    rep = diagnose(model, trace, path, pairs=pairs, enabled=cfg.diagnostics, level=level,
                   min_time_steps=cfg.min_time_steps, cutoff_fraction=cfg.tolerance("cutoff_fraction"),
                   phase_resolution=cfg.tolerance("phase_resolution"))
    inv = _invariants(cfg, trace, path, rep)
    scalars = rep.scalars()
    if isinstance(model, models.GroverAdiabatic):
        scalars["grover"] = _grover_checks(model)
    report = {
        "format": REPORT_FORMAT,
        "config": cfg.to_dict(),
        "run": {"model": model.label, "dim": model.dim, "steps": cfg.steps,
                "total_time": float(model.total_time), "dt": float(trace.dt)},
        "diagnostics": scalars,
        "invariants": inv,
    }
    report["passed"] = all(v["passed"] for v in inv.values())
    if timing:
        report["wall_clock_seconds"] = time.perf_counter() - started
    stride = cfg.timeseries_stride or max(1, cfg.steps // 2000)
    return report, timeseries_csv(trace, path, rep, stride)


def _attach_expectations(report, expect):
    if expect:
        report["expectations"] = evaluate_expectations(expect, report)
        report["passed"] = report["passed"] and all(e["passed"] for e in report["expectations"].values())


def run_config(cfg, output_dir=None, timing=False):
    """Run a scenario and write ``<name>.report.json`` and ``<name>.timeseries.csv``.

    With ``companion_dual`` the dual of the model is run on the same grid and
    written under ``<name>_dual``; ``expect`` keys starting with ``dual.`` are
    checked against that second report.
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    model = build_model(cfg.model, cfg.total_time, cfg.steps, cfg.base_dir)
    runs = [(cfg.name, model, {k: v for k, v in cfg.expect.items() if not k.startswith("dual.")})]
    if cfg.companion_dual:
        if isinstance(model, models.DualModel):
            raise ConfigError("companion_dual needs a non-dual base model")
        dual = models.dual_of(model, cfg.steps + 1)
        runs.append((f"{cfg.name}_dual", dual,
                     {k[len("dual."):]: v for k, v in cfg.expect.items() if k.startswith("dual.")}))
    results = []
    for name, mdl, expect in runs:
        report, series = run_model(cfg, mdl, timing)
        _attach_expectations(report, expect)
        files = [reportio.write_text(out / f"{name}.report.json", reportio.dumps(report)),
                 reportio.write_text(out / f"{name}.timeseries.csv", series)]
        log.info("wrote %s", ", ".join(map(str, files)))
        results.append(RunResult(report, files))
    return results


def loglog_slope(x, y):
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(x, y, 1)[0])


SWEEP_HEADER = ["T", "n", "m", "max_abs_A_frozen", "max_abs_A_live", "re_eps", "im_eps", "abs_eps",
                "zeros_re", "zeros_im", "M", "zero_count_bound", "cutoff_tilde_omega", "dominant_path"]


def sweep_point(cfg, total_time):
    model = build_model(cfg.model, total_time, cfg.steps, cfg.base_dir)
    path = spectrum_path(model, cfg.steps, cfg.tolerance("gap_tol"))
    trace = evolve(model, initial_state(cfg, path), cfg.steps, phase_bound=cfg.tolerance("phase_bound"))
    level = cfg.initial_state.get("level", 0)
    rep = diagnose(model, trace, path, pairs=[tuple(p) for p in cfg.pairs] if cfg.pairs else None,
                   enabled=SWEEP_DIAGNOSTICS, level=level, cutoff_fraction=cfg.tolerance("cutoff_fraction"),
                   phase_resolution=cfg.tolerance("phase_resolution"))
    rows = []
    for n, m in rep.pairs:
        k = pair_key(n, m)
        eps, z = rep.eps_nm[k], rep.zero_counts[k]
        rows.append([float(total_time), n, m, rep.max_abs_a[k]["frozen"], rep.max_abs_a[k]["live"],
                     float(eps.real), float(eps.imag), float(abs(eps)), z.re, z.im, z.total,
                     float(rep.zero_count_bound[k]), float(rep.cutoff[k].tilde_omega_c),
                     float(rep.dominant_path[k])])
    return rows


def _sweep_point_args(args):
    return sweep_point(*args)


def sweep_config(cfg, output_dir=None, jobs=1):
    """One table row per sweep time and pair; log-log slope of ``max|A|`` as footer.

    Writes ``<name>.sweep.csv`` and ``<name>.sweep.json``.
    """
    if not cfg.sweep:
        raise ConfigError("sweep needs a non-empty 'sweep' list of total times")
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    args = [(cfg, T) for T in cfg.sweep]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_t = list(pool.map(_sweep_point_args, args))
    else:
        per_t = [sweep_point(*a) for a in args]
    rows = [r for chunk in per_t for r in chunk]

    slopes = {}
    if len(cfg.sweep) > 1:
        for n, m in sorted({(r[1], r[2]) for r in rows}):
            sel = [r for r in rows if (r[1], r[2]) == (n, m)]
            slopes[pair_key(n, m)] = loglog_slope([r[0] for r in sel], [r[3] for r in sel])
    footer = [f"# loglog_slope_max_abs_A_frozen,{k},{reportio.format_float(v)}" for k, v in sorted(slopes.items())]
    table = reportio.csv_table(SWEEP_HEADER, rows, footer)
    summary = {"format": "adialab-sweep/1", "config": cfg.to_dict(),
               "rows": [dict(zip(SWEEP_HEADER, r)) for r in rows]}
    if slopes:
        summary["loglog_slope_max_abs_A_frozen"] = slopes
    files = [reportio.write_text(out / f"{cfg.name}.sweep.csv", table),
             reportio.write_text(out / f"{cfg.name}.sweep.json", reportio.dumps(summary))]
    return summary, files
