"""One-call assembly of every diagnostic for a run."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coupling import PHASE_RESOLUTION, a_nm_path, adiabatic_error, error_direct, traditional_metric
from .spectral import (count_derivative_zeros, cutoff_frequency, dominant_path_estimate,
                       fourier_a, zero_count_bound)
from .spectrum import amplitudes, eigenstate_drift, level_probabilities
from .theorem import min_time

ALL_DIAGNOSTICS = (
    "traditional_metric",
    "level_probabilities",
    "amplitudes",
    "adiabatic_error",
    "zero_count",
    "fourier",
    "eigenstate_drift",
    "min_time",
)


def pair_key(n, m):
    return f"{n},{m}"


@dataclass
class DiagnosticsReport:
    """Scalar diagnostics plus the sampled series they were computed from.

    Disabled diagnostics stay ``None``.  Pairs are keyed ``"n,m"``.
    """

    pairs: list
    degenerate: dict
    traditional_metric: Optional[dict] = None
    eps_nm: Optional[dict] = None
    eps_m: Optional[dict] = None
    eps_m_complete: Optional[dict] = None
    error_direct: Optional[dict] = None
    zero_counts: Optional[dict] = None
    max_abs_a: Optional[dict] = None
    zero_count_bound: Optional[dict] = None
    cutoff: Optional[dict] = None
    dominant_path: Optional[dict] = None
    min_time: Optional[object] = None
    min_time_multiplier: float = 10.0
    level_probabilities: Optional[np.ndarray] = None
    amplitudes: Optional[np.ndarray] = None
    eigenstate_drift: Optional[np.ndarray] = None
    a_nm: dict = field(default_factory=dict)

    def scalars(self):
        """JSON-ready dictionary of the scalar results."""
        out = {"pairs": [list(p) for p in self.pairs],
               "degenerate_pairs": {pair_key(*k): v for k, v in sorted(self.degenerate.items())}}
        if self.traditional_metric is not None:
            out["traditional_metric"] = dict(self.traditional_metric)
        if self.eps_nm is not None:
            out["eps_nm"] = {k: _cplx(v) for k, v in self.eps_nm.items()}
            out["eps_m"] = {k: _cplx(v) for k, v in self.eps_m.items()}
            out["eps_m_complete"] = dict(self.eps_m_complete)
            out["error_direct"] = {k: _cplx(v) for k, v in self.error_direct.items()}
        if self.zero_counts is not None:
            out["zero_counts"] = {k: {"re": z.re, "im": z.im, "total": z.total}
                                  for k, z in self.zero_counts.items()}
            out["zero_count_bound"] = dict(self.zero_count_bound)
        if self.max_abs_a is not None:
            out["max_abs_a"] = dict(self.max_abs_a)
        if self.cutoff is not None:
            out["cutoff_tilde_omega"] = {k: {"value": c.tilde_omega_c, "all_below": c.all_below}
                                         for k, c in self.cutoff.items()}
            out["dominant_path_estimate"] = dict(self.dominant_path)
        if self.min_time is not None:
            mt = self.min_time
            out["min_time"] = {"value": mt.value, "n": mt.n, "m": mt.m, "s": mt.s,
                               "multiplier": self.min_time_multiplier,
                               "recommended_total_time": self.min_time_multiplier * mt.value}
        if self.level_probabilities is not None:
            p = self.level_probabilities
            out["final_probabilities"] = p[-1].tolist()
            out["min_probabilities"] = p.min(axis=0).tolist()
            out["max_probabilities"] = p.max(axis=0).tolist()
        if self.eigenstate_drift is not None:
            out["min_eigenstate_drift"] = self.eigenstate_drift.min(axis=0).tolist()
        return out


def _cplx(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z)), "abs": float(abs(z))}


def diagnose(model, trace, path, pairs=None, enabled=ALL_DIAGNOSTICS, level=0,
             min_time_steps=2000, cutoff_fraction=0.01, phase_resolution=PHASE_RESOLUTION):
    """Run the enabled diagnostics on a finished evolution.

    ``pairs`` are ``(n, m)`` transitions out of level ``n``; by default every
    ``(level, m)`` with ``m != level``.  ``eps_m`` sums over every source level
    ``n``, not only the requested pairs; sources degenerate with ``m`` are
    skipped and ``eps_m_complete[m]`` is then ``False``.
    """
    enabled = set(enabled)
    unknown = enabled - set(ALL_DIAGNOSTICS)
    if unknown:
        raise ValueError(f"unknown diagnostics: {sorted(unknown)}")
    d = model.dim
    if pairs is None:
        pairs = [(level, m) for m in range(d) if m != level]
    pairs = [tuple(int(i) for i in p) for p in pairs]
    rep = DiagnosticsReport(pairs=pairs, degenerate=dict(path.degenerate))

    if "traditional_metric" in enabled:
        tm = traditional_metric(path, model, pairs)
        rep.traditional_metric = {pair_key(*p): v for p, v in tm.items()}
    if "level_probabilities" in enabled:
        rep.level_probabilities = level_probabilities(trace, path)
    if "eigenstate_drift" in enabled:
        rep.eigenstate_drift = np.stack([eigenstate_drift(path, n) for n in range(d)], axis=1)

    need_amp = enabled & {"amplitudes", "adiabatic_error", "zero_count", "fourier"}
    if need_amp:
        amp = amplitudes(trace, path)
        rep.amplitudes = amp.amplitudes
        for n, m in pairs:
            rep.a_nm[(n, m)] = a_nm_path(amp, path, model, n, m)
        rep.max_abs_a = {pair_key(*p): {"frozen": float(np.max(np.abs(a.frozen))),
                                         "live": float(np.max(np.abs(a.live)))}
                         for p, a in rep.a_nm.items()}

    if "adiabatic_error" in enabled:
        rep.eps_nm = {pair_key(*p): adiabatic_error(a, path, phase_resolution) for p, a in rep.a_nm.items()}
        rep.eps_m, rep.eps_m_complete, rep.error_direct = {}, {}, {}
        for m in sorted({m for _, m in pairs}):
            total, complete = 0j, True
            for n in range(d):
                if n == m:
                    continue
                if (min(n, m), max(n, m)) in path.degenerate:
                    complete = False
                elif pair_key(n, m) in rep.eps_nm:
                    total += rep.eps_nm[pair_key(n, m)]
                else:
                    total += adiabatic_error(a_nm_path(amp, path, model, n, m), path, phase_resolution)
            rep.eps_m[str(m)] = -total
            rep.eps_m_complete[str(m)] = complete
            rep.error_direct[str(m)] = error_direct(amp, m)

    if "zero_count" in enabled:
        rep.zero_counts, rep.zero_count_bound = {}, {}
        for p, a in rep.a_nm.items():
            z = count_derivative_zeros(a.frozen)
            rep.zero_counts[pair_key(*p)] = z
            rep.zero_count_bound[pair_key(*p)] = zero_count_bound(a.frozen, z)

    if "fourier" in enabled:
        rep.cutoff, rep.dominant_path = {}, {}
        for p, a in rep.a_nm.items():
            spec = fourier_a(a.frozen, model.total_time)  # frozen: the lowest-order form
            rep.cutoff[pair_key(*p)] = cutoff_frequency(spec, cutoff_fraction)
            rep.dominant_path[pair_key(*p)] = dominant_path_estimate(spec, path, *p)

    if "min_time" in enabled:
        rep.min_time = min_time(model, min_time_steps, level=level)
    return rep
