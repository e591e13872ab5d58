"""Time-dependent Hamiltonians with analytic derivatives.

Every model evaluates on scalars or on 1-D arrays of times; an array of K
times returns a ``(K, d, d)`` stack.  Times are in natural units (hbar = 1).
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .errors import DimMismatch, InvalidParams


def _stack(coeffs, mats):
    """``sum_i coeffs[i][..., None, None] * mats[i]`` for scalar or array coefficients."""
    out = None
    for c, m in zip(coeffs, mats):
        term = np.asarray(c, dtype=float)[..., None, None] * m
        out = term if out is None else out + term
    return out


class HamiltonianModel:
    """Base class: a Hermitian ``H(t)`` on ``[0, total_time]``.

    Subclasses implement :meth:`evaluate`, :meth:`derivative` and, where the
    model is used for curvature checks, :meth:`second_derivative`.
    """

    dim: int
    total_time: float
    label: str

    def evaluate(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def second_derivative(self, t):
        raise NotImplementedError(f"{self.label} has no analytic second derivative")

    # reparametrized views on s = t / T
    def h_of_s(self, s):
        return self.evaluate(np.asarray(s) * self.total_time)

    def dh_ds(self, s):
        return self.total_time * self.derivative(np.asarray(s) * self.total_time)

    def d2h_ds2(self, s):
        return self.total_time**2 * self.second_derivative(np.asarray(s) * self.total_time)

    def with_total_time(self, total_time):
        """Same schedule stretched to a new duration."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.label} dim={self.dim} T={self.total_time:g}>"


def _positive(name, value):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise InvalidParams(f"{name} must be finite and positive, got {value!r}")
    return value


@dataclass(frozen=True)
class DrivenTwoLevelParams:
    eps: float
    V: float
    omega0: float

    def __post_init__(self):
        for name in ("eps", "V", "omega0"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True, repr=False)
class DrivenTwoLevel(HamiltonianModel):
    params: DrivenTwoLevelParams
    total_time: float
    dim: int = 2
    label: str = "driven_two_level"

    def evaluate(self, t):
        p = self.params
        return _stack([-0.5 * p.eps, -p.V * np.sin(p.omega0 * np.asarray(t))],
                      [nk.SIGMA_Z, nk.SIGMA_X])

    def derivative(self, t):
        p = self.params
        return _stack([-p.V * p.omega0 * np.cos(p.omega0 * np.asarray(t))], [nk.SIGMA_X])

    def second_derivative(self, t):
        p = self.params
        return _stack([p.V * p.omega0**2 * np.sin(p.omega0 * np.asarray(t))], [nk.SIGMA_X])

    def with_total_time(self, total_time):
        return driven_two_level(self.params, total_time)

    @property
    def rabi_period(self):
        return 2 * np.pi / self.params.V


def driven_two_level(p, total_time=None):
    """``H(t) = -(eps/2) sigma_z - V sin(omega0 t) sigma_x``.

    ``total_time`` defaults to half a Rabi period, ``pi / V``.
    """
    if not isinstance(p, DrivenTwoLevelParams):
        p = DrivenTwoLevelParams(*p) if not isinstance(p, dict) else DrivenTwoLevelParams(**p)
    T = np.pi / p.V if total_time is None else _positive("total_time", total_time)
    return DrivenTwoLevel(p, float(T))


@dataclass(frozen=True, repr=False)
class RotatingField(HamiltonianModel):
    eps: float
    total_time: float
    turns: int
    dim: int = 2
    label: str = "rotating_field"

    @property
    def rate(self):
        return 2 * np.pi * self.turns / self.total_time

    def angle(self, t):
        return self.rate * np.asarray(t, dtype=float)

    def evaluate(self, t):
        th = self.angle(t)
        return _stack([-0.5 * self.eps * np.cos(th), -0.5 * self.eps * np.sin(th)],
                      [nk.SIGMA_Z, nk.SIGMA_X])

    def derivative(self, t):
        th = self.angle(t)
        k = 0.5 * self.eps * self.rate
        return _stack([k * np.sin(th), -k * np.cos(th)], [nk.SIGMA_Z, nk.SIGMA_X])

    def second_derivative(self, t):
        th = self.angle(t)
        k = 0.5 * self.eps * self.rate**2
        return _stack([k * np.cos(th), k * np.sin(th)], [nk.SIGMA_Z, nk.SIGMA_X])

    def with_total_time(self, total_time):
        return rotating_field(self.eps, total_time, self.turns)


def rotating_field(eps, T, turns=1):
    """Field of fixed strength ``eps`` rotating ``turns`` times in the x-z plane.

    The gap is constant while the eigenbasis rotates through a full circle,
    so the instantaneous ground state becomes orthogonal to its initial value
    at ``t = T / (2 turns)``.
    """
    eps = _positive("eps", eps)
    T = _positive("T", T)
    if int(turns) != turns or turns < 1:
        raise InvalidParams(f"turns must be a positive integer, got {turns!r}")
    return RotatingField(eps, T, int(turns))


@dataclass(frozen=True, repr=False, eq=False)
class LinearInterpolation(HamiltonianModel):
    h0: np.ndarray
    h1: np.ndarray
    total_time: float
    dim: int = 0
    label: str = "linear_interpolation"

    def evaluate(self, t):
        s = np.asarray(t, dtype=float) / self.total_time
        return _stack([1 - s, s], [self.h0, self.h1])

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to((self.h1 - self.h0) / self.total_time, t.shape + (self.dim, self.dim)).copy()

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (self.dim, self.dim), dtype=complex)

    def with_total_time(self, total_time):
        return linear_interpolation(self.h0, self.h1, total_time)


def linear_interpolation(H0, H1, T):
    """``H(t) = (1 - t/T) H0 + (t/T) H1``."""
    h0 = np.array(H0, dtype=complex)
    h1 = np.array(H1, dtype=complex)
    if h0.shape != h1.shape or h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
        raise DimMismatch(f"endpoint shapes {h0.shape} and {h1.shape} are not equal square matrices")
    for name, h in (("H0", h0), ("H1", h1)):
        if np.max(np.abs(h - h.conj().T)) > nk.HERMITIAN_TOL:
            raise InvalidParams(f"{name} is not Hermitian")
    h0.setflags(write=False)
    h1.setflags(write=False)
    return LinearInterpolation(h0, h1, _positive("T", T), dim=h0.shape[0])


def landau_zener(delta, T, sweep=1.0):
    """Two-level avoided crossing: bias swept from ``-sweep/2`` to ``+sweep/2``.

    ``H0 = -(sweep/2) sigma_z + (delta/2) sigma_x`` and ``H1`` flips the bias,
    so the minimum gap (at ``s = 1/2``) is ``delta``.
    """
    h0 = -0.5 * sweep * nk.SIGMA_Z + 0.5 * delta * nk.SIGMA_X
    h1 = 0.5 * sweep * nk.SIGMA_Z + 0.5 * delta * nk.SIGMA_X
    return linear_interpolation(h0, h1, T)


@dataclass(frozen=True, repr=False, eq=False)
class GroverAdiabatic(HamiltonianModel):
    n_qubits: int
    marked: int
    total_time: float
    dim: int = 0
    label: str = "grover_adiabatic"
    _proj_u: np.ndarray = field(default=None, compare=False)
    _proj_m: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        n = 2**self.n_qubits
        u = np.full(n, 1 / np.sqrt(n), dtype=complex)
        pm = np.zeros((n, n), dtype=complex)
        pm[self.marked, self.marked] = 1.0
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "_proj_u", np.outer(u, u.conj()))
        object.__setattr__(self, "_proj_m", pm)

    @property
    def initial_hamiltonian(self):
        return np.eye(self.dim) - self._proj_u

    @property
    def final_hamiltonian(self):
        return np.eye(self.dim) - self._proj_m

    def evaluate(self, t):
        s = np.asarray(t, dtype=float) / self.total_time
        return _stack([1 - s, s], [self.initial_hamiltonian, self.final_hamiltonian])

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        d = (self._proj_u - self._proj_m) / self.total_time
        return np.broadcast_to(d, t.shape + (self.dim, self.dim)).copy()

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (self.dim, self.dim), dtype=complex)

    def with_total_time(self, total_time):
        return grover_adiabatic(self.n_qubits, self.marked, total_time)


def grover_adiabatic(n_qubits, marked, T):
    """Adiabatic search: ``(1-s)(I - |u><u|) + s(I - |m><m|)``, ``s = t/T``."""
    if int(n_qubits) != n_qubits or not 1 <= n_qubits <= 6:
        raise InvalidParams(f"n_qubits must be an integer in 1..6, got {n_qubits!r}")
    n_qubits = int(n_qubits)
    if int(marked) != marked or not 0 <= marked < 2**n_qubits:
        raise InvalidParams(f"marked must be a basis index below {2**n_qubits}, got {marked!r}")
    return GroverAdiabatic(n_qubits, int(marked), _positive("T", T))


class DualModel(HamiltonianModel):
    """``Hbar(t) = -U(t)^dagger H(t) U(t)`` built on a propagation grid.

    ``U`` is stored on the grid; between grid points it is advanced from the
    preceding grid point by one exponential step evaluated at the midpoint of
    the partial interval.  The derivative is a central difference with the
    grid spacing.
    """

    def __init__(self, base, times, propagators):
        self.base = base
        self.times = times
        self.propagators = propagators
        self.dim = base.dim
        self.total_time = base.total_time
        self.label = f"dual_of({base.label})"
        self.dt = times[1] - times[0]

    def propagator(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t)
        n_steps = len(self.times) - 1
        k = np.clip(np.floor(flat / self.dt).astype(int), 0, n_steps - 1)
        tau = flat - self.times[k]
        exact = tau == 0.0
        out = self.propagators[k].copy()
        if not exact.all():
            idx = np.flatnonzero(~exact)
            mid = self.times[k[idx]] + 0.5 * tau[idx]
            w = nk.expm_minus_iH(self.base.evaluate(mid), tau[idx])
            out[idx] = w @ self.propagators[k[idx]]
        return out.reshape(t.shape + (self.dim, self.dim))

    def evaluate(self, t):
        u = self.propagator(t)
        h = self.base.evaluate(t)
        hb = -np.swapaxes(u, -1, -2).conj() @ h @ u
        return 0.5 * (hb + np.swapaxes(hb, -1, -2).conj())

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return (self.evaluate(t + self.dt) - self.evaluate(t - self.dt)) / (2 * self.dt)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return (self.evaluate(t + self.dt) - 2 * self.evaluate(t) + self.evaluate(t - self.dt)) / self.dt**2

    def with_total_time(self, total_time):
        return dual_of(self.base.with_total_time(total_time), len(self.times))


def dual_of(base, grid_points):
    """Wrap ``base`` into its dual system on ``grid_points`` uniform times."""
    from .propagate import accumulate_propagator

    if isinstance(base, DualModel):
        raise InvalidParams("dual_of expects a base model, not another dual")
    if int(grid_points) != grid_points or grid_points < 2:
        raise InvalidParams(f"grid_points must be an integer >= 2, got {grid_points!r}")
    steps = int(grid_points) - 1
    props = accumulate_propagator(base, steps)
    times = np.linspace(0.0, base.total_time, steps + 1)
    return DualModel(base, times, props)
