# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel for the delay-difference recurrence (hot loop of the simulator)."""

import numpy as np


def sdd_recurrence(double[:, :, ::1] w, double[:, ::1] noise):
    """Iterate x_t = sum_k W[k-1] @ x_{t-k} + noise_t with zero initial history.

    w has shape (p, n, n); noise has shape (T, n). Returns the (T, n) trajectory.
    """
    cdef Py_ssize_t p = w.shape[0]
    cdef Py_ssize_t t_total = noise.shape[0]
    cdef Py_ssize_t n = noise.shape[1]
    out_arr = np.zeros((t_total, n))
    cdef double[:, ::1] x = out_arr
    cdef Py_ssize_t t, i, j, k, kmax
    cdef double acc
    with nogil:
        for t in range(t_total):
            kmax = p if t >= p else t
            for i in range(n):
                acc = noise[t, i]
                for k in range(1, kmax + 1):
                    for j in range(n):
                        acc += w[k - 1, i, j] * x[t - k, j]
                x[t, i] = acc
    return out_arr
