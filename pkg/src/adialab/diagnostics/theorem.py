"""Schedule-level checks on ``H(s)``, ``s = t/T``: minimum time, curvature, Grover."""

from typing import NamedTuple

import numpy as np

from .. import numkernel as nk
from ..errors import DegenerateGap, InvalidParams
from ..models import GroverAdiabatic
from .spectrum import GAP_TOL


class MinTime(NamedTuple):
    value: float
    n: int
    m: int
    s: float


def min_time(model, s_steps, level=0, gap_tol=GAP_TOL):
    """Largest ``|<E_m|dH/ds|E_level>| / E_{level,m}^2`` over the s-grid and all m.

    The adiabatic run from ``level`` needs ``T`` well above this number; the
    value is independent of ``T`` because ``dH/ds = T dH/dt`` at fixed ``s``.
    """
    s_grid = np.linspace(0.0, 1.0, int(s_steps) + 1)
    n = level
    best = MinTime(0.0, n, (n + 1) % model.dim, 0.0)
    for sl in nk.chunk_slices(len(s_grid), model.dim):
        s = s_grid[sl]
        w, v = nk.eigh_batch(model.h_of_s(s))
        mel = np.einsum("kim,kij,kj->km", v.conj(), model.dh_ds(s), v[:, :, n])
        gaps = w[:, [n]] - w
        for m in range(model.dim):
            if m == n:
                continue
            small = np.abs(gaps[:, m]) < gap_tol
            if small.any():
                k = int(np.flatnonzero(small)[0])
                raise DegenerateGap((n, m), s[k] * model.total_time, gaps[k, m], gap_tol)
            ratio = np.abs(mel[:, m]) / gaps[:, m] ** 2
            k = int(np.argmax(ratio))
            if ratio[k] > best.value:
                best = MinTime(float(ratio[k]), n, m, float(s[k]))
    return best


def gap_profile(model, s_steps, lower=0, upper=1):
    """``(s, E_upper(s) - E_lower(s))`` on a uniform s-grid."""
    s_grid = np.linspace(0.0, 1.0, int(s_steps) + 1)
    gaps = np.empty_like(s_grid)
    for sl in nk.chunk_slices(len(s_grid), model.dim):
        w, _ = nk.eigh_batch(model.h_of_s(s_grid[sl]))
        gaps[sl] = w[:, upper] - w[:, lower]
    return s_grid, gaps


class CurvatureCheck(NamedTuple):
    analytic: float
    finite_difference: float
    relative_error: float


def curvature_check(model, n, s, h=1e-3, gap_tol=GAP_TOL):
    """Second-order perturbation formula for ``d^2 E_n / ds^2`` vs a central difference."""
    es = nk.eigh(model.h_of_s(s))
    dh = model.dh_ds(s)
    d2h = model.d2h_ds2(s)
    vn = es.vectors[:, n]
    analytic = float(np.real(vn.conj() @ d2h @ vn))
    for m in range(model.dim):
        if m == n:
            continue
        gap = es.values[n] - es.values[m]
        if abs(gap) < gap_tol:
            raise DegenerateGap((n, m), s * model.total_time, gap, gap_tol)
        analytic += 2 * abs(es.vectors[:, m].conj() @ dh @ vn) ** 2 / gap
    w, _ = nk.eigh_batch(model.h_of_s(np.array([s - h, s, s + h])))
    fd = float((w[0, n] - 2 * w[1, n] + w[2, n]) / h**2)
    scale = max(abs(analytic), abs(fd))
    rel = 0.0 if scale == 0 else abs(analytic - fd) / scale
    return CurvatureCheck(analytic, fd, rel)


def grover_selection_rule(model, s_samples):
    """Largest ``||(1 - P_01) dH/ds |E_0(s)>||`` over ``s_samples``.

    ``P_01`` projects on the two lowest levels; the projector form does not
    care how a degenerate excited manifold is resolved.
    """
    if not isinstance(model, GroverAdiabatic):
        raise InvalidParams("the selection rule applies to grover_adiabatic models only")
    s = np.asarray(s_samples, dtype=float)
    if model.dim == 2:
        return 0.0
    w, v = nk.eigh_batch(model.h_of_s(s))
    low = v[:, :, :2]
    g = np.einsum("kij,kj->ki", model.dh_ds(s), v[:, :, 0])
    resid = g - np.einsum("kij,kj->ki", low, np.einsum("kji,kj->ki", low.conj(), g))
    return float(np.max(np.linalg.norm(resid, axis=1)))
