"""Pure numpy implementation of the simulation kernels.

Same signatures and in-place semantics as the compiled ``_ckernels`` module.
"""
from __future__ import annotations

import numpy as np

_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def apply_1q(state: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> None:
    view = state.reshape(1 << qubit, 2, 1 << (n - 1 - qubit))
    view[...] = np.einsum("ij,ajb->aib", mat, view)


def apply_2q(state: np.ndarray, mat: np.ndarray, q0: int, q1: int, n: int) -> None:
    tensor = state.reshape((2,) * n)
    gate = mat.reshape(2, 2, 2, 2)
    moved = np.tensordot(gate, tensor, axes=([2, 3], [q0, q1]))
    tensor[...] = np.moveaxis(moved, [0, 1], [q0, q1])


def depolarize_pair(rho: np.ndarray, q0: int, q1: int, n: int, p: float) -> None:
    tensor = rho.reshape((2,) * (2 * n))
    block = np.moveaxis(tensor, [q0, q1, n + q0, n + q1], [-4, -3, -2, -1])
    reduced = np.einsum("...abab->...", block)
    block *= 1.0 - p
    for a in (0, 1):
        for b in (0, 1):
            block[..., a, b, a, b] += (p / 4.0) * reduced


def _parity(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values).astype(np.int64) & 1 if hasattr(np, "bitwise_count") else _slow_parity(values)


def _slow_parity(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    v = values.copy()
    while v.any():
        out ^= v & 1
        v >>= 1
    return out


def pauli_expval_sv(state: np.ndarray, xmask: int, zmask: int, ny: int) -> complex:
    idx = np.arange(state.shape[0], dtype=np.int64)
    signs = 1 - 2 * _parity(idx & zmask)
    return complex(np.sum(np.conj(state[idx ^ xmask]) * state * signs) * _PHASES[ny & 3])


def pauli_expval_dm(rho: np.ndarray, xmask: int, zmask: int, ny: int) -> complex:
    idx = np.arange(rho.shape[0], dtype=np.int64)
    signs = 1 - 2 * _parity(idx & zmask)
    return complex(np.sum(rho[idx, idx ^ xmask] * signs) * _PHASES[ny & 3])
