"""Non-adiabatic couplings, the A_nm functions and the error integrals."""

from dataclasses import dataclass

import numpy as np

from .. import numkernel as nk
from ..errors import PhaseUnderResolved

PHASE_RESOLUTION = 0.3


def derivative_elements(path, model, n, m):
    """``<E_m(t_k)| dH/dt |E_n(t_k)>`` along the path."""
    out = np.empty(len(path.times), dtype=complex)
    for sl in nk.chunk_slices(len(path.times), model.dim):
        dh = model.derivative(path.times[sl])
        out[sl] = np.einsum("ki,kij,kj->k", path.vectors[sl, :, m].conj(), dh, path.vectors[sl, :, n])
    return out


def coupling_series(path, model, n, m):
    """``<E_m|d/dt E_n> = <E_m|dH/dt|E_n> / E_nm`` at every grid point."""
    if n == m:
        raise ValueError("coupling needs two distinct levels")
    path.require_nondegenerate(n, m)
    return derivative_elements(path, model, n, m) / path.gap(n, m)


def coupling_element(path, model, k, n, m):
    """Coupling at grid index ``k`` from the Hellmann-Feynman-type identity.

    Never differentiates eigenvectors; see :func:`finite_difference_coupling`
    for the independent check.
    """
    if n == m:
        raise ValueError("coupling needs two distinct levels")
    path.require_nondegenerate(n, m)
    dh = model.derivative(path.times[k])
    num = path.vectors[k, :, m].conj() @ dh @ path.vectors[k, :, n]
    return num / (path.values[k, n] - path.values[k, m])


def finite_difference_coupling(path, k, n, m):
    """``<E_m(t_k)| (|E_n(t_k+1)> - |E_n(t_k-1)>) / 2dt`` on the gauge-fixed path."""
    if not 0 < k < len(path.times) - 1:
        raise IndexError("central difference needs an interior grid index")
    diff = path.vectors[k + 1, :, n] - path.vectors[k - 1, :, n]
    return path.vectors[k, :, m].conj() @ diff / (2 * path.dt)


def _pairs(dim, pairs):
    if pairs is None:
        return [(n, m) for n in range(dim) for m in range(n + 1, dim)]
    return [tuple(int(i) for i in p) for p in pairs]


def traditional_metric(path, model, pairs=None):
    """``max_t |<E_m|dH/dt|E_n>| / E_nm^2`` per pair (all ``n < m`` by default)."""
    pairs = _pairs(path.dim, pairs)
    for n, m in pairs:
        path.require_nondegenerate(n, m)
    out = {p: 0.0 for p in pairs}
    for sl in nk.chunk_slices(len(path.times), model.dim):
        v = path.vectors[sl]
        mel = np.swapaxes(v, 1, 2).conj() @ model.derivative(path.times[sl]) @ v
        for n, m in pairs:
            gap = path.values[sl, n] - path.values[sl, m]
            val = np.max(np.abs(mel[:, m, n]) / gap**2)
            out[(n, m)] = max(out[(n, m)], float(val))
    return out


@dataclass(frozen=True)
class AnmPath:
    """``A_nm(t_k)`` with live amplitudes ``a_n(t)`` and frozen ``a_n(0)``."""

    n: int
    m: int
    times: np.ndarray
    live: np.ndarray
    frozen: np.ndarray

    @property
    def total_time(self):
        return self.times[-1]


def a_nm_path(amp, path, model, n, m):
    """``A_nm = a_n <E_m|d/dt E_n> / E_nm`` in both amplitude variants."""
    ratio = coupling_series(path, model, n, m) / path.gap(n, m)
    a_n = amp.amplitudes[:, n]
    return AnmPath(n, m, path.times, a_n * ratio, a_n[0] * ratio)


def _trapezoid(f, dt):
    return dt * (np.sum(f) - 0.5 * (f[0] + f[-1]))


def adiabatic_error(anm, path, phase_resolution=PHASE_RESOLUTION):
    """``eps_nm = int_0^T A_nm E_nm exp(-i int_0^t E_nm) dt`` by composite trapezoid.

    Uses the live amplitudes and the stored dynamical phases.  Raises
    :class:`PhaseUnderResolved` when ``max |E_nm| dt`` exceeds
    ``phase_resolution``.
    """
    n, m = anm.n, anm.m
    gap = path.gap(n, m)
    worst = float(np.max(np.abs(gap)) * path.dt)
    if worst > phase_resolution:
        raise PhaseUnderResolved(worst, phase_resolution, (n, m))
    integrand = anm.live * gap * np.exp(-1j * path.phase_difference(n, m))
    return complex(_trapezoid(integrand, path.dt))


def level_errors(amp, path, model, m, phase_resolution=PHASE_RESOLUTION):
    """``(eps_m, {n: eps_nm})`` with ``eps_m = -sum_{n != m} eps_nm``."""
    parts = {}
    for n in range(path.dim):
        if n == m:
            continue
        anm = a_nm_path(amp, path, model, n, m)
        parts[n] = adiabatic_error(anm, path, phase_resolution)
    return -sum(parts.values()), parts


def error_direct(amp, m):
    """``a_m(T) - a_m(0)`` read off the integrated state."""
    a = amp.amplitudes[:, m]
    return complex(a[-1] - a[0])
