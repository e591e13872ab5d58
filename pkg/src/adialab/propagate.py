"""Unitary integration of ``i d/dt psi = H(t) psi`` on a uniform grid.

Each step applies ``exp(-i H(t_k + dt/2) dt)`` (exponential midpoint rule):
second order in ``dt`` and unitary to rounding, so no renormalization is
ever applied to the state.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from . import numkernel as nk
from .errors import DimMismatch, GridTooCoarse, InvalidParams, NotNormalized

PHASE_BOUND = 0.1
NORM_TOL = 1e-10


@dataclass(frozen=True)
class EvolutionTrace:
    label: str
    times: np.ndarray
    states: np.ndarray
    propagators: Optional[np.ndarray] = None

    @property
    def step_count(self):
        return len(self.times) - 1

    @property
    def dt(self):
        return self.times[1] - self.times[0]

    @property
    def final_state(self):
        return self.states[-1]


def _check_steps(steps):
    if int(steps) != steps or steps < 1:
        raise InvalidParams(f"steps must be a positive integer, got {steps!r}")
    return int(steps)


def step_unitaries(model, steps, phase_bound=PHASE_BOUND):
    """Yield ``(slice, W)`` chunks of single-step unitaries.

    Raises :class:`GridTooCoarse` when a midpoint Hamiltonian has spectral
    norm times ``dt`` above ``phase_bound``.
    """
    steps = _check_steps(steps)
    dt = model.total_time / steps
    mids = (np.arange(steps) + 0.5) * dt
    for sl in nk.chunk_slices(steps, model.dim):
        w, v = nk.eigh_batch(model.evaluate(mids[sl]))
        norms = np.max(np.abs(w), axis=1)
        worst = int(np.argmax(norms))
        if norms[worst] * dt > phase_bound:
            raise GridTooCoarse(norms[worst] * dt, phase_bound, mids[sl][worst])
        yield sl, nk.unitary_from_eig(w, v, dt)


def check_grid(model, steps, phase_bound=PHASE_BOUND):
    """Run the per-step phase guard without keeping any unitaries."""
    for _ in step_unitaries(model, steps, phase_bound):
        pass


def evolve(model, psi0, steps, keep_propagators=False, phase_bound=PHASE_BOUND):
    """Integrate from ``psi0`` at ``t = 0`` to ``t = T`` in ``steps`` steps."""
    steps = _check_steps(steps)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (model.dim,):
        raise DimMismatch(f"initial state has shape {psi0.shape}, model dim is {model.dim}")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1) > NORM_TOL:
        raise NotNormalized(f"initial state norm {norm:.15g} differs from 1")

    d = model.dim
    states = np.empty((steps + 1, d), dtype=np.complex128)
    states[0] = psi0
    props = None
    if keep_propagators:
        props = np.empty((steps + 1, d, d), dtype=np.complex128)
        props[0] = np.eye(d)
    for sl, w in step_unitaries(model, steps, phase_bound):
        w = np.ascontiguousarray(w)
        chunk = _kernels.apply_chain(w, states[sl.start])
        states[sl.start + 1:sl.stop + 1] = chunk[1:]
        if keep_propagators:
            pchunk = _kernels.accumulate_chain(w, np.ascontiguousarray(props[sl.start]))
            props[sl.start + 1:sl.stop + 1] = pchunk[1:]
    times = np.linspace(0.0, model.total_time, steps + 1)
    return EvolutionTrace(model.label, times, states, props)


def accumulate_propagator(model, steps, phase_bound=PHASE_BOUND):
    """Time-ordered propagators ``U(t_k)`` for ``k = 0..steps``, ``U(0) = I``."""
    steps = _check_steps(steps)
    d = model.dim
    props = np.empty((steps + 1, d, d), dtype=np.complex128)
    props[0] = np.eye(d)
    for sl, w in step_unitaries(model, steps, phase_bound):
        pchunk = _kernels.accumulate_chain(np.ascontiguousarray(w), np.ascontiguousarray(props[sl.start]))
        props[sl.start + 1:sl.stop + 1] = pchunk[1:]
    return props
