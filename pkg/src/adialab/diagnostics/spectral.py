"""Finite-interval Fourier analysis of A_nm and the zero-count bound."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class FourierSpectrum:
    """``A~(omega) = int_0^T exp(i omega t) A(t) dt`` on bins ``omega_j = 2 pi j / T``.

    ``tilde_omega`` holds the dimensionless frequencies ``omega_j T = 2 pi j``
    for ``j = -N/2 .. N/2``.
    """

    tilde_omega: np.ndarray
    values: np.ndarray
    total_time: float

    @property
    def omega(self):
        return self.tilde_omega / self.total_time

    def nearest(self, omega):
        """Values at the bins nearest to the physical frequencies ``omega``."""
        j = np.rint(np.asarray(omega) * self.total_time / (2 * np.pi)).astype(int)
        j0 = int(np.rint(self.tilde_omega[0] / (2 * np.pi)))
        idx = np.clip(j - j0, 0, len(self.values) - 1)
        return self.values[idx]


def fourier_a(samples, T):
    """Transform uniform samples ``A(t_k)``, ``k = 0..N``, over ``[0, T]``.

    Trapezoid weights are used, so a constant ``c`` gives exactly ``c T`` at
    zero frequency and nothing elsewhere.  Forward sign is ``exp(+i omega t)``.
    """
    a = np.asarray(samples, dtype=complex)
    n = len(a) - 1
    if n < 1:
        raise ValueError("need at least two samples")
    folded = a[:n].copy()
    folded[0] = 0.5 * (a[0] + a[n])
    dt = T / n
    full = dt * n * np.fft.ifft(folded)
    j = np.arange(-(n // 2), n // 2 + 1)
    return FourierSpectrum(2 * np.pi * j.astype(float), full[j % n], float(T))


class Cutoff(NamedTuple):
    tilde_omega_c: float
    all_below: bool


def cutoff_frequency(spectrum, threshold_fraction=0.01):
    """Smallest ``|omega~|`` beyond which ``|A~| <= threshold_fraction * max |A~|``."""
    mag = np.abs(spectrum.values)
    peak = mag.max()
    if peak == 0:
        return Cutoff(0.0, True)
    above = mag > threshold_fraction * peak
    return Cutoff(float(np.max(np.abs(spectrum.tilde_omega[above]))), False)


def dominant_path_estimate(spectrum, path, n, m):
    """Resonance indicator ``T max_k |A~(omega_nm(t_k)) E_nm(t_k)|``.

    ``omega_nm`` is the running mean gap; ``A~`` is read at the nearest bin.
    An order-of-magnitude quantity, not an error value.
    """
    w = path.mean_gap(n, m)
    vals = spectrum.nearest(w) * path.gap(n, m)
    return float(spectrum.total_time * np.max(np.abs(vals)))


class ZeroCount(NamedTuple):
    re: int
    im: int
    total: int


def _count_sign_changes(x):
    count = int(np.count_nonzero(np.sign(x[1:]) * np.sign(x[:-1]) < 0))
    zero = x == 0
    if zero.any() and not zero.all():
        # a run of exact zeros strictly inside the interval counts once
        edges = np.diff(np.concatenate([[0], zero.astype(np.int8), [0]]))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        count += int(np.count_nonzero((starts > 0) & (ends < len(x))))
    return count


def count_derivative_zeros(samples, rel_floor=1e-12):
    """Zeros of ``dA/dt`` from central differences, per real/imaginary part.

    Derivative samples with magnitude below ``rel_floor`` times the largest
    one are treated as exact zeros, so rounding noise in an identically
    vanishing component does not register.
    """
    a = np.asarray(samples, dtype=complex)
    if len(a) < 3:
        raise ValueError("need at least three samples")
    da = np.gradient(a)
    scale = max(np.max(np.abs(da.real)), np.max(np.abs(da.imag)))
    floor = rel_floor * scale
    re = np.where(np.abs(da.real) <= floor, 0.0, da.real)
    im = np.where(np.abs(da.imag) <= floor, 0.0, da.imag)
    m_re, m_im = _count_sign_changes(re), _count_sign_changes(im)
    return ZeroCount(m_re, m_im, m_re + m_im)


def zero_count_bound(samples, zeros):
    """``2 (M + 1) max |A|`` with ``M`` the component-summed zero count.

    Splitting ``[0, T]`` at the ``M`` zeros gives ``M + 1`` monotone pieces;
    the bound keeps that count rather than the bare ``M``.
    """
    m = zeros.total if isinstance(zeros, ZeroCount) else int(zeros)
    return float(2 * (m + 1) * np.max(np.abs(samples)))
