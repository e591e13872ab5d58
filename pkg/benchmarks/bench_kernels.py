"""Time the compiled kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Both variants are importable in one process, so the kernel table does not
depend on ADIALAB_BACKEND.  ``--end-to-end`` also runs a full evolution plus
spectrum path in a subprocess under each backend flag.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from adialab import _backend, _kernels

END_TO_END = """
import time
from adialab.diagnostics import spectrum_path
from adialab.models import rotating_field
from adialab.propagate import evolve
import numpy as np
m = rotating_field(1.0, 200.0, 1)
w = rotating_field(1.0, 2.0, 1)
spectrum_path(w, 200); evolve(w, np.array([1, 0], complex), 200)
t0 = time.perf_counter()
p = spectrum_path(m, 20000)
evolve(m, p.vectors[0][:, 0].copy(), 20000)
print(time.perf_counter() - t0)
"""


def random_hermitian(rng, batch, n):
    a = rng.normal(size=(batch, n, n)) + 1j * rng.normal(size=(batch, n, n))
    return (a + a.conj().transpose(0, 2, 1)) / 2


def random_unitaries(rng, batch, n):
    q, _ = np.linalg.qr(random_hermitian(rng, batch, n) + 1j * np.eye(n))
    return q


def cases(rng):
    for n in (2, 4, 8, 16):
        h = random_hermitian(rng, 2000, n)
        yield f"jacobi_eigh_batch B=2000 n={n}", (
            lambda h=h: _kernels.jacobi_eigh_batch_nb(h, 60, 1e-14),
            lambda h=h: _kernels.jacobi_eigh_batch_np(h, 60, 1e-14))
    for n in (2, 8):
        u = random_unitaries(rng, 100_000, n)
        psi = np.zeros(n, complex)
        psi[0] = 1
        eye = np.eye(n, dtype=complex)
        yield f"apply_chain steps=1e5 n={n}", (
            lambda u=u, psi=psi: _kernels.apply_chain_nb(u, psi),
            lambda u=u, psi=psi: _kernels.apply_chain_np(u, psi))
        yield f"accumulate_chain steps=1e5 n={n}", (
            lambda u=u, e=eye: _kernels.accumulate_chain_nb(u, e),
            lambda u=u, e=eye: _kernels.accumulate_chain_np(u, e))


def end_to_end(repeat):
    out = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, ADIALAB_BACKEND=backend)
        runs = [float(subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                                     capture_output=True, text=True).stdout) for _ in range(repeat)]
        out[backend] = min(runs)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if not _backend.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(7)
    print(f"{'kernel':<36} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for label, (fast, slow) in cases(rng):
        fast()  # compile
        t_nb = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{label:<36} {t_nb:>10.2f} {t_np:>10.2f} {t_np / t_nb:>7.1f}x")
    if args.end_to_end:
        t = end_to_end(min(args.repeat, 3))
        print(f"{'rotating field, 2e4 steps (s)':<36} {t['numba']:>10.3f} {t['numpy']:>10.3f} "
              f"{t['numpy'] / t['numba']:>7.1f}x")


if __name__ == "__main__":
    main()
