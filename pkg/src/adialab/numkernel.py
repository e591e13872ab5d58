"""Dense complex linear algebra used by every other module.

Hermitian eigendecomposition is done with cyclic Jacobi rotations (see
:mod:`adialab._kernels`), so results do not depend on which LAPACK numpy was
linked against.  Matrices are small (dim <= 64); batches are stacked along a
leading axis.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateMatchAmbiguity, DimMismatch, NoConvergence, NonHermitian

HERMITIAN_TOL = 1e-12
MAX_SWEEPS = 100
JACOBI_TOL = 1e-14
TIE_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with eigenvectors stored as columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self):
        return self.values.shape[0]

    def vector(self, n):
        return self.vectors[:, n]


def _check_hermitian(h):
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise DimMismatch(f"expected square matrices, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NonHermitian("matrix has non-finite entries")
    dev = np.max(np.abs(h - np.swapaxes(h, -1, -2).conj())) if h.size else 0.0
    if dev > HERMITIAN_TOL:
        raise NonHermitian(f"max |H - H^dagger| = {dev:.3g} exceeds {HERMITIAN_TOL:g}")


def eigh_batch(hs):
    """Diagonalize a stack of Hermitian matrices.

    Returns ``(values, vectors)`` with shapes ``(B, n)`` and ``(B, n, n)``;
    values ascend along the last axis and ``vectors[b][:, i]`` pairs with
    ``values[b, i]``.
    """
    hs = np.asarray(hs, dtype=np.complex128)
    _check_hermitian(hs)
    if hs.ndim == 2:
        hs = hs[None]
    hs = 0.5 * (hs + np.swapaxes(hs, -1, -2).conj())
    w, v, sweeps = _kernels.jacobi_eigh_batch(np.ascontiguousarray(hs), MAX_SWEEPS, JACOBI_TOL)
    if np.any(sweeps < 0):
        bad = int(np.flatnonzero(sweeps < 0)[0])
        raise NoConvergence(
            f"Jacobi diagonalization of batch entry {bad} exceeded {MAX_SWEEPS} sweeps"
        )
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def eigh(h):
    """Eigen-decompose one Hermitian matrix into an :class:`EigenSystem`."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2:
        raise DimMismatch(f"expected a single matrix, got shape {h.shape}")
    w, v = eigh_batch(h[None])
    return EigenSystem(w[0], v[0])


def unitary_from_eig(values, vectors, dt):
    """``sum_n exp(-i E_n dt) |v_n><v_n|`` for stacked or single eigensystems."""
    phases = np.exp(-1j * values * np.asarray(dt)[..., None])
    return np.einsum("...ij,...j,...kj->...ik", vectors, phases, vectors.conj())


def expm_minus_iH(h, dt):
    """Unitary ``exp(-i H dt)`` of a Hermitian matrix.

    A stack of matrices with a matching array of ``dt`` is also accepted.
    """
    h = np.asarray(h, dtype=np.complex128)
    if not np.all(np.isfinite(dt)):
        raise ValueError("dt must be finite")
    if h.ndim == 2:
        es = eigh(h)
        return unitary_from_eig(es.values, es.vectors, float(dt))
    w, v = eigh_batch(h)
    return unitary_from_eig(w, v, np.broadcast_to(np.asarray(dt, dtype=float), w.shape[:1]))


def greedy_match(overlaps, tie_tol=TIE_TOL):
    """Match rows (previous levels) to columns (current levels).

    Picks the largest remaining ``|overlap|`` first.  Returns ``perm`` with
    ``perm[i]`` the column matched to row ``i``.  Raises
    :class:`DegenerateMatchAmbiguity` when a pick is tied within ``tie_tol``
    with a competing entry in the same free row or column.
    """
    mag = np.abs(np.asarray(overlaps))
    n = mag.shape[0]
    perm = np.full(n, -1, dtype=int)
    free_r = np.ones(n, dtype=bool)
    free_c = np.ones(n, dtype=bool)
    flat = np.argsort(-mag, axis=None, kind="stable")
    for f in flat:
        i, j = divmod(int(f), n)
        if not (free_r[i] and free_c[j]):
            continue
        best = mag[i, j]
        row_rivals = mag[i, free_c & (np.arange(n) != j)]
        col_rivals = mag[free_r & (np.arange(n) != i), j]
        rivals = np.concatenate([row_rivals, col_rivals])
        if rivals.size and np.max(rivals) >= best - tie_tol:
            raise DegenerateMatchAmbiguity(
                f"overlap assignment tie for level {i}: {best:.12g} vs {np.max(rivals):.12g}"
            )
        perm[i] = j
        free_r[i] = False
        free_c[j] = False
    return perm


def align_phases(prev, cur):
    """Re-phase (and if needed re-order) ``cur`` to follow ``prev``.

    Levels are matched by maximum overlap, then each matched vector is
    multiplied by the unit phase that makes ``<prev_n|cur_n>`` real and
    non-negative.  This is one step of discrete parallel transport.
    """
    if prev.dim != cur.dim:
        raise DimMismatch(f"dims differ: {prev.dim} vs {cur.dim}")
    ov = prev.vectors.conj().T @ cur.vectors
    perm = greedy_match(ov)
    vecs = cur.vectors[:, perm]
    vals = cur.values[perm]
    o = ov[np.arange(cur.dim), perm]
    mag = np.abs(o)
    # overlaps already real-positive up to rounding are left untouched, which
    # makes re-aligning an aligned system an exact no-op
    settled = (o.real >= 0) & (np.abs(o.imag) <= 8 * np.finfo(float).eps * mag)
    phase = np.where(settled | (mag == 0), 1.0, o.conj() / np.where(mag > 0, mag, 1.0))
    return EigenSystem(vals, vecs * phase[None, :])


def chunk_slices(n, dim, budget=2**20):
    """Slices over ``range(n)`` keeping each ``(chunk, dim, dim)`` stack bounded."""
    size = max(1, budget // (dim * dim))
    for start in range(0, n, size):
        yield slice(start, min(n, start + size))
