# cython: language_level=3
"""Compiled kernels for the linear-policy hot path.

These three operations run once per agent per dialogue exchange during
training (tens of millions of calls for a full training grid), which makes
per-call numpy dispatch overhead the dominant cost. Keep signatures in sync
with mddial.pykernels.
"""

import numpy as np

cimport numpy as cnp


def q_values(double[:, ::1] weights, double[::1] features, out=None):
    """Action values weights @ features; writes into ``out`` when given."""
    cdef Py_ssize_t n = weights.shape[0]
    cdef Py_ssize_t k = weights.shape[1]
    if out is None:
        out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(k):
            acc += weights[i, j] * features[j]
        res[i] = acc
    return out


def argmax_q(double[:, ::1] weights, double[::1] features):
    """Index of the best action; ties resolve to the lowest index."""
    cdef Py_ssize_t n = weights.shape[0]
    cdef Py_ssize_t k = weights.shape[1]
    cdef Py_ssize_t i, j, best = 0
    cdef double acc, best_q = -1e308
    for i in range(n):
        acc = 0.0
        for j in range(k):
            acc += weights[i, j] * features[j]
        if acc > best_q:
            best_q = acc
            best = i
    return best


def q_value_at(double[:, ::1] weights, Py_ssize_t action, double[::1] features):
    """Single action value weights[action] . features."""
    cdef Py_ssize_t k = weights.shape[1]
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(k):
        acc += weights[action, j] * features[j]
    return acc


def add_scaled(double[:, ::1] weights, Py_ssize_t action, double[::1] features, double scale):
    """In-place TD step: weights[action] += scale * features."""
    cdef Py_ssize_t k = weights.shape[1]
    cdef Py_ssize_t j
    for j in range(k):
        weights[action, j] += scale * features[j]
