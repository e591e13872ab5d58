"""Hot loops: batched complex Jacobi diagonalization and propagator chains.

Every kernel exists twice.  The ``*_nb`` variants are scalar loops compiled
with numba; the ``*_np`` variants vectorize the same arithmetic over the batch
axis with numpy.  Both are importable regardless of the backend flag so the
benchmark and the parity tests can call them side by side; the public
dispatchers at the bottom pick one according to ``_backend.USE_NUMBA``.
"""

import numpy as np

from . import _backend
from ._backend import njit

# Jacobi rotation for the (p, q) plane of a Hermitian matrix A with
# A[p, q] = b * e, b >= 0, |e| = 1.  With D = diag(1, conj(e)) the block
# D^H A D is real symmetric, and the unitary J = D R D^H, R = [[c, s], [-s, c]],
# annihilates A[p, q]:
#   columns  A[:, p] <- c A[:, p] - s conj(e) A[:, q]
#            A[:, q] <- s e A[:, p] + c A[:, q]
#   rows     A[p, :] <- c A[p, :] - s e A[q, :]
#            A[q, :] <- s conj(e) A[p, :] + c A[q, :]


@njit
def _jacobi_one_nb(a, v, max_sweeps, tol):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            v[i, j] = 0.0
        v[i, i] = 1.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        diag = 0.0
        for i in range(n):
            diag += a[i, i].real * a[i, i].real
            for j in range(i + 1, n):
                off += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
        if off == 0.0 or off <= tol * tol * (diag + 2.0 * off):
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b == 0.0:
                    continue
                e = apq / b
                ec = e.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * b)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ec * akq
                    a[k, q] = s * e * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * e * aqk
                    a[q, k] = s * ec * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * ec * vkq
                    v[k, q] = s * e * vkp + c * vkq
    return -1


@njit
def jacobi_eigh_batch_nb(h, max_sweeps, tol):
    """Unsorted eigenvalues, eigenvectors and sweep counts for a (B, n, n) stack."""
    nb, n, _ = h.shape
    w = np.empty((nb, n))
    vecs = np.empty((nb, n, n), dtype=np.complex128)
    sweeps = np.empty(nb, dtype=np.int64)
    a = np.empty((n, n), dtype=np.complex128)
    for b in range(nb):
        for i in range(n):
            for j in range(n):
                a[i, j] = h[b, i, j]
        sweeps[b] = _jacobi_one_nb(a, vecs[b], max_sweeps, tol)
        for i in range(n):
            w[b, i] = a[i, i].real
    return w, vecs, sweeps


def jacobi_eigh_batch_np(h, max_sweeps, tol):
    """Same contract as :func:`jacobi_eigh_batch_nb`, vectorized over the batch."""
    a = np.array(h, dtype=np.complex128, copy=True)
    nb, n, _ = a.shape
    v = np.zeros_like(a)
    idx = np.arange(n)
    v[:, idx, idx] = 1.0
    sweeps = np.full(nb, -1, dtype=np.int64)
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sum(np.abs(a[:, iu[0], iu[1]]) ** 2, axis=1)
        diag = np.sum(a[:, idx, idx].real ** 2, axis=1)
        done = (off == 0.0) | (off <= tol * tol * (diag + 2.0 * off))
        newly = done & (sweeps < 0)
        sweeps[newly] = sweep
        if done.all() or sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                b = np.abs(apq)
                live = b > 0.0
                bs = np.where(live, b, 1.0)
                e = np.where(live, apq / bs, 1.0)
                ec = e.conj()
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * bs)
                with np.errstate(over="ignore"):
                    t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta < 0.0, -t, t)
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc = c[:, None]
                sec = (s * ec)[:, None]
                se = (s * e)[:, None]
                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = cc * colp - sec * colq
                a[:, :, q] = se * colp + cc * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = cc * rowp - se * rowq
                a[:, q, :] = sec * rowp + cc * rowq
                a[:, p, q] = np.where(live, 0.0, a[:, p, q])
                a[:, q, p] = np.where(live, 0.0, a[:, q, p])
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = cc * vp - sec * vq
                v[:, :, q] = se * vp + cc * vq
    return a[:, idx, idx].real.copy(), v, sweeps


@njit
def apply_chain_nb(steps, psi0):
    n_steps, d, _ = steps.shape
    out = np.empty((n_steps + 1, d), dtype=np.complex128)
    for i in range(d):
        out[0, i] = psi0[i]
    for k in range(n_steps):
        for i in range(d):
            acc = 0.0j
            for j in range(d):
                acc += steps[k, i, j] * out[k, j]
            out[k + 1, i] = acc
    return out


def apply_chain_np(steps, psi0):
    out = np.empty((steps.shape[0] + 1, steps.shape[1]), dtype=np.complex128)
    out[0] = psi0
    for k in range(steps.shape[0]):
        out[k + 1] = steps[k] @ out[k]
    return out


@njit
def accumulate_chain_nb(steps, u0):
    n_steps, d, _ = steps.shape
    out = np.empty((n_steps + 1, d, d), dtype=np.complex128)
    out[0] = u0
    for k in range(n_steps):
        for i in range(d):
            for j in range(d):
                acc = 0.0j
                for m in range(d):
                    acc += steps[k, i, m] * out[k, m, j]
                out[k + 1, i, j] = acc
    return out


def accumulate_chain_np(steps, u0):
    out = np.empty((steps.shape[0] + 1,) + u0.shape, dtype=np.complex128)
    out[0] = u0
    for k in range(steps.shape[0]):
        out[k + 1] = steps[k] @ out[k]
    return out


if _backend.USE_NUMBA:
    jacobi_eigh_batch = jacobi_eigh_batch_nb
    apply_chain = apply_chain_nb
    accumulate_chain = accumulate_chain_nb
else:
    jacobi_eigh_batch = jacobi_eigh_batch_np
    apply_chain = apply_chain_np
    accumulate_chain = accumulate_chain_np
