"""Compare the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from qphonon import _pykernels

try:
    from qphonon import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _cases(n: int, rng: np.random.Generator):
    state = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    state /= np.linalg.norm(state)
    rho = np.outer(state, state.conj())
    u1 = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    u2 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    xmask, zmask = 0b101101 % 2**n, 0b110011 % 2**n
    ny = bin(xmask & zmask).count("1")
    return {
        "apply_1q": lambda k: k.apply_1q(state.copy(), u1, 1, n),
        "apply_2q": lambda k: k.apply_2q(state.copy(), u2, 0, n - 1, n),
        "apply_2q(density)": lambda k: k.apply_2q(rho.reshape(-1).copy(), u2, 0, n - 1, 2 * n),
        "depolarize_pair": lambda k: k.depolarize_pair(rho.copy(), 0, n - 1, n, 0.01),
        "pauli_expval_sv": lambda k: k.pauli_expval_sv(state, xmask, zmask, ny),
        "pauli_expval_dm": lambda k: k.pauli_expval_dm(rho, xmask, zmask, ny),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--widths", type=int, nargs="+", default=[6, 8, 10])
    args = parser.parse_args()
    backends = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled extension not available; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'n':>4}" + "".join(f"{name + ' (us)':>16}" for name, _ in backends) + f"{'speedup':>10}")
    for n in args.widths:
        for label, fn in _cases(n, rng).items():
            times = [min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e6 for _, mod in backends]
            speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
            print(f"{label:<20}{n:>4}" + "".join(f"{t:>16.1f}" for t in times) + speed)


if __name__ == "__main__":
    main()
