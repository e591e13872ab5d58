"""Instantaneous eigenpaths and the state quantities projected onto them."""

from dataclasses import dataclass, field

import numpy as np

from .. import numkernel as nk
from ..errors import DegenerateGap, GridMismatch

GAP_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumPath:
    """Level-tracked, parallel-transported eigenpairs on a uniform grid.

    ``values[k, n]`` and ``vectors[k][:, n]`` follow level ``n`` continuously;
    labels are fixed by the ascending order at ``t = 0`` and never re-sorted.
    ``degenerate`` maps a pair ``(n, m)``, ``n < m``, to the first grid index
    where ``|E_n - E_m| < gap_tol``.
    """

    label: str
    times: np.ndarray
    values: np.ndarray
    vectors: np.ndarray
    dynamical_phases: np.ndarray
    gap_tol: float = GAP_TOL
    degenerate: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def dt(self):
        return self.times[1] - self.times[0]

    def gap(self, n, m):
        """``E_nm(t_k) = E_n(t_k) - E_m(t_k)``."""
        return self.values[:, n] - self.values[:, m]

    def gaps(self):
        return self.values[:, :, None] - self.values[:, None, :]

    def phase_difference(self, n, m):
        return self.dynamical_phases[:, n] - self.dynamical_phases[:, m]

    def mean_gap(self, n, m):
        """Running mean of ``E_nm`` from 0 to ``t_k``; the gap itself at ``t = 0``."""
        out = np.empty_like(self.times)
        out[0] = self.values[0, n] - self.values[0, m]
        out[1:] = self.phase_difference(n, m)[1:] / self.times[1:]
        return out

    def require_nondegenerate(self, n, m):
        key = (min(n, m), max(n, m))
        if key in self.degenerate:
            k = self.degenerate[key]
            raise DegenerateGap(
                (n, m), self.times[k], self.values[k, n] - self.values[k, m], self.gap_tol
            )


def _clusters(w, tol):
    """Groups of consecutive ascending eigenvalues closer than ``tol``."""
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _track_step(m_ov, w_cur, gap_tol):
    """Gauge matrix ``G`` with ``aligned_cur = raw_cur @ G`` and per-label values.

    ``m_ov[i, j] = <aligned_prev_i | raw_cur_j>``.  Non-degenerate levels are
    matched by maximum overlap and re-phased; a degenerate cluster receives the
    labels with most weight in it and is rotated by the polar factor of its
    overlap block, which is the subspace version of parallel transport.
    """
    d = len(w_cur)
    groups = _clusters(w_cur, gap_tol)
    g = np.zeros((d, d), dtype=complex)
    vals = np.empty(d)
    if len(groups) == d:
        perm = nk.greedy_match(m_ov)
        o = m_ov[np.arange(d), perm]
        mag = np.abs(o)
        settled = (o.real >= 0) & (np.abs(o.imag) <= 8 * np.finfo(float).eps * mag)
        phase = np.where(settled | (mag == 0), 1.0, o.conj() / np.where(mag > 0, mag, 1.0))
        g[perm, np.arange(d)] = phase
        vals[:] = w_cur[perm]
        return g, vals
    weight = np.stack([np.sum(np.abs(m_ov[:, c]) ** 2, axis=1) for c in groups], axis=1)
    capacity = [len(c) for c in groups]
    owner = [[] for _ in groups]
    free = np.ones(d, dtype=bool)
    for f in np.argsort(-weight, axis=None, kind="stable"):
        i, c = divmod(int(f), len(groups))
        if free[i] and len(owner[c]) < capacity[c]:
            owner[c].append(i)
            free[i] = False
    for c, cols in enumerate(groups):
        labels = sorted(owner[c])
        block = m_ov[np.ix_(labels, cols)]
        if len(cols) == 1:
            o = block[0, 0]
            mag = abs(o)
            settled = o.real >= 0 and abs(o.imag) <= 8 * np.finfo(float).eps * mag
            q = np.array([[1.0 if settled or mag == 0 else o.conjugate() / mag]])
        else:
            wl, _, zh = np.linalg.svd(block)
            q = zh.conj().T @ wl.conj().T
        g[np.ix_(cols, labels)] = q
        vals[labels] = w_cur[cols]
    return g, vals


def _resolve_initial_clusters(model, w0, v0, gap_tol):
    """Rotate degenerate blocks at ``t = 0`` onto the eigenbasis of ``dH/dt`` within them.

    Those are the combinations that split off linearly, so labels assigned at
    ``t = 0`` continue smoothly into the first grid step.  Modifies ``v0``.
    """
    for group in _clusters(w0, gap_tol):
        if len(group) < 2:
            continue
        block = v0[:, group]
        proj = block.conj().T @ model.derivative(0.0) @ block
        es = nk.eigh(0.5 * (proj + proj.conj().T))
        v0[:, group] = block @ es.vectors


def spectrum_path(model, steps, gap_tol=GAP_TOL):
    """Diagonalize ``model`` on ``steps + 1`` uniform times and track levels.

    Degenerate pairs are recorded in ``SpectrumPath.degenerate`` rather than
    raised; diagnostics that divide by a gap call
    :meth:`SpectrumPath.require_nondegenerate`.
    """
    steps = int(steps)
    times = np.linspace(0.0, model.total_time, steps + 1)
    k_pts, d = steps + 1, model.dim
    raw_w = np.empty((k_pts, d))
    raw_v = np.empty((k_pts, d, d), dtype=complex)
    for sl in nk.chunk_slices(k_pts, d):
        raw_w[sl], raw_v[sl] = nk.eigh_batch(model.evaluate(times[sl]))

    _resolve_initial_clusters(model, raw_w[0], raw_v[0], gap_tol)
    clustered = np.any(np.diff(raw_w, axis=1) < gap_tol, axis=1) if d > 1 else np.zeros(k_pts, bool)
    ov_diag = np.einsum("kji,kji->ki", raw_v[:-1].conj(), raw_v[1:])
    fast = not clustered.any() and bool(np.all(np.abs(ov_diag) ** 2 > 0.5))

    if fast:
        mag = np.abs(ov_diag)
        settled = (ov_diag.real >= 0) & (np.abs(ov_diag.imag) <= 8 * np.finfo(float).eps * mag)
        step_phase = np.where(settled, 1.0, ov_diag.conj() / mag)
        gauge = np.ones((k_pts, d), dtype=complex)
        gauge[1:] = np.cumprod(step_phase, axis=0)
        off = np.abs(np.abs(gauge) - 1) > 0
        gauge[off] /= np.abs(gauge[off])
        values = raw_w
        vectors = raw_v * gauge[:, None, :]
    else:
        values = np.empty_like(raw_w)
        vectors = np.empty_like(raw_v)
        g0, values[0] = _track_step(np.eye(d, dtype=complex), raw_w[0], gap_tol)
        vectors[0] = raw_v[0] @ g0
        for k in range(1, k_pts):
            m_ov = vectors[k - 1].conj().T @ raw_v[k]
            g, values[k] = _track_step(m_ov, raw_w[k], gap_tol)
            vectors[k] = raw_v[k] @ g

    phases = np.zeros_like(values)
    dt = times[1] - times[0]
    phases[1:] = np.cumsum(0.5 * dt * (values[1:] + values[:-1]), axis=0)

    degenerate = {}
    for n in range(d):
        for m in range(n + 1, d):
            bad = np.flatnonzero(np.abs(values[:, n] - values[:, m]) < gap_tol)
            if bad.size:
                degenerate[(n, m)] = int(bad[0])
    return SpectrumPath(model.label, times, values, vectors, phases, gap_tol, degenerate)


def _require_same_grid(trace, path):
    if len(trace.times) != len(path.times) or not np.allclose(trace.times, path.times, rtol=0, atol=1e-12 * max(1.0, path.times[-1])):
        raise GridMismatch(
            f"trace has {len(trace.times)} points on [0, {trace.times[-1]:g}], "
            f"path has {len(path.times)} on [0, {path.times[-1]:g}]"
        )


def projections(trace, path):
    """``<E_n(t_k)|psi(t_k)>`` for every grid point and level."""
    _require_same_grid(trace, path)
    return np.einsum("kin,ki->kn", path.vectors.conj(), trace.states)


def level_probabilities(trace, path):
    """``P_n(t_k) = |<E_n(t_k)|psi(t_k)>|^2``."""
    return np.abs(projections(trace, path)) ** 2


@dataclass(frozen=True)
class AmplitudePath:
    times: np.ndarray
    amplitudes: np.ndarray

    def __getitem__(self, n):
        return self.amplitudes[:, n]


def amplitudes(trace, path):
    """Slow amplitudes ``a_n = exp(+i int_0^t E_n) <E_n|psi>``."""
    return AmplitudePath(path.times, np.exp(1j * path.dynamical_phases) * projections(trace, path))


def eigenstate_drift(path, n):
    """``|<E_n(t_k)|E_n(0)>|`` along the path."""
    return np.abs(path.vectors[:, :, n].conj() @ path.vectors[0, :, n])


def rabi_ground_probability(V, t):
    """Rotating-wave ground-level probability at resonance, ``(cos Vt + 1) / 2``."""
    return 0.5 * (np.cos(V * np.asarray(t)) + 1.0)
