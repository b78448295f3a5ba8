# cython: language_level=3
"""Compiled statevector / density-matrix kernels.

Layout conventions shared with ``_pykernels``: states are flat complex128
arrays of length ``2**n`` in big-endian order (qubit 0 is the most
significant bit); density matrices are C-contiguous ``(2**n, 2**n)`` arrays.
Pauli strings are passed as ``(xmask, zmask, ny)`` bit masks.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline Py_ssize_t _insert_zero(Py_ssize_t k, Py_ssize_t bit) nogil:
    # spread k around a zero at position ``bit``
    cdef Py_ssize_t low = k & ((1 << bit) - 1)
    return ((k >> bit) << (bit + 1)) | low


def apply_1q(cplx[::1] state, const cplx[:, ::1] mat, int qubit, int n):
    cdef Py_ssize_t bit = n - 1 - qubit
    cdef Py_ssize_t mask = 1 << bit
    cdef Py_ssize_t half = (<Py_ssize_t>1) << (n - 1)
    cdef Py_ssize_t k, i0, i1
    cdef cplx a0, a1
    cdef cplx m00 = mat[0, 0], m01 = mat[0, 1], m10 = mat[1, 0], m11 = mat[1, 1]
    with nogil:
        for k in range(half):
            i0 = _insert_zero(k, bit)
            i1 = i0 | mask
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m00 * a0 + m01 * a1
            state[i1] = m10 * a0 + m11 * a1


def apply_2q(cplx[::1] state, const cplx[:, ::1] mat, int q0, int q1, int n):
    cdef Py_ssize_t b0 = n - 1 - q0
    cdef Py_ssize_t b1 = n - 1 - q1
    cdef Py_ssize_t lo = b0 if b0 < b1 else b1
    cdef Py_ssize_t hi = b1 if b0 < b1 else b0
    cdef Py_ssize_t m0 = 1 << b0
    cdef Py_ssize_t m1 = 1 << b1
    cdef Py_ssize_t quarter = (<Py_ssize_t>1) << (n - 2)
    cdef Py_ssize_t k, base, r, c
    cdef Py_ssize_t idx[4]
    cdef cplx amp[4]
    cdef cplx acc
    with nogil:
        for k in range(quarter):
            base = _insert_zero(_insert_zero(k, lo), hi)
            idx[0] = base
            idx[1] = base | m1
            idx[2] = base | m0
            idx[3] = base | m0 | m1
            for r in range(4):
                amp[r] = state[idx[r]]
            for r in range(4):
                acc = 0
                for c in range(4):
                    acc = acc + mat[r, c] * amp[c]
                state[idx[r]] = acc


def depolarize_pair(cplx[:, ::1] rho, int q0, int q1, int n, double p):
    cdef Py_ssize_t b0 = n - 1 - q0
    cdef Py_ssize_t b1 = n - 1 - q1
    cdef Py_ssize_t lo = b0 if b0 < b1 else b1
    cdef Py_ssize_t hi = b1 if b0 < b1 else b0
    cdef Py_ssize_t m0 = 1 << b0
    cdef Py_ssize_t m1 = 1 << b1
    cdef Py_ssize_t quarter = (<Py_ssize_t>1) << (n - 2)
    cdef Py_ssize_t kr, kc, r0, c0, a, b
    cdef Py_ssize_t offs[4]
    cdef cplx tr
    cdef double keep = 1.0 - p
    cdef double share = p / 4.0
    offs[0] = 0
    offs[1] = m1
    offs[2] = m0
    offs[3] = m0 | m1
    with nogil:
        for kr in range(quarter):
            r0 = _insert_zero(_insert_zero(kr, lo), hi)
            for kc in range(quarter):
                c0 = _insert_zero(_insert_zero(kc, lo), hi)
                tr = 0
                for a in range(4):
                    tr = tr + rho[r0 | offs[a], c0 | offs[a]]
                for a in range(4):
                    for b in range(4):
                        rho[r0 | offs[a], c0 | offs[b]] = keep * rho[r0 | offs[a], c0 | offs[b]]
                    rho[r0 | offs[a], c0 | offs[a]] = rho[r0 | offs[a], c0 | offs[a]] + share * tr


cdef inline cplx _phase(int ny):
    cdef int r = ny & 3
    if r == 0:
        return 1
    elif r == 1:
        return 1j
    elif r == 2:
        return -1
    return -1j


def pauli_expval_sv(const cplx[::1] state, long long xmask, long long zmask, int ny):
    cdef Py_ssize_t dim = state.shape[0]
    cdef Py_ssize_t b
    cdef cplx acc = 0
    cdef cplx term
    with nogil:
        for b in range(dim):
            term = state[b ^ xmask].conjugate() * state[b]
            if __builtin_popcountll(b & zmask) & 1:
                acc = acc - term
            else:
                acc = acc + term
    return acc * _phase(ny)


def pauli_expval_dm(const cplx[:, ::1] rho, long long xmask, long long zmask, int ny):
    cdef Py_ssize_t dim = rho.shape[0]
    cdef Py_ssize_t b
    cdef cplx acc = 0
    with nogil:
        for b in range(dim):
            if __builtin_popcountll(b & zmask) & 1:
                acc = acc - rho[b, b ^ xmask]
            else:
                acc = acc + rho[b, b ^ xmask]
    return acc * _phase(ny)
