# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO core.

Mirror of _smo_py.smo_solve: identical expressions in identical order so the
two cores return bit-identical duals (the build disables FP contraction for
the same reason). Keep the two files in sync.
"""

import numpy as np

from libc.math cimport INFINITY

cdef double _TAU = 1e-12

BACKEND_NAME = "compiled"


def smo_solve(double[:, ::1] q_matrix, double[::1] labels, double box,
              double tol, long max_iter):
    """Maximal-violating-pair SMO; see the pure-python twin for the contract."""
    cdef Py_ssize_t n = labels.shape[0]
    alpha_arr = np.zeros(n, dtype=np.float64)
    grad_arr = np.full(n, -1.0, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] grad = grad_arr
    cdef long n_iter = 0
    cdef bint converged = False
    cdef Py_ssize_t i, j, t
    cdef double gmax, gmin, myg
    cdef double quad, delta, diff, total, ai, aj, dai, daj

    while n_iter < max_iter:
        gmax = -INFINITY
        gmin = INFINITY
        i = 0
        j = 0
        for t in range(n):
            myg = -(labels[t] * grad[t])
            if (labels[t] > 0.0 and alpha[t] < box) or \
               (labels[t] <= 0.0 and alpha[t] > 0.0):
                if myg > gmax:
                    gmax = myg
                    i = t
            if (labels[t] > 0.0 and alpha[t] > 0.0) or \
               (labels[t] <= 0.0 and alpha[t] < box):
                if myg < gmin:
                    gmin = myg
                    j = t
        if gmax - gmin <= tol:
            converged = True
            break
        if labels[i] != labels[j]:
            quad = q_matrix[i, i] + q_matrix[j, j] + 2.0 * q_matrix[i, j]
            if quad <= 0.0:
                quad = _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            ai = alpha[i] + delta
            aj = alpha[j] + delta
            if diff > 0.0:
                if aj < 0.0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = -diff
            if diff > 0.0:
                if ai > box:
                    ai = box
                    aj = box - diff
            else:
                if aj > box:
                    aj = box
                    ai = box + diff
        else:
            quad = q_matrix[i, i] + q_matrix[j, j] - 2.0 * q_matrix[i, j]
            if quad <= 0.0:
                quad = _TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            ai = alpha[i] - delta
            aj = alpha[j] + delta
            if total > box:
                if ai > box:
                    ai = box
                    aj = total - box
            else:
                if aj < 0.0:
                    aj = 0.0
                    ai = total
            if total > box:
                if aj > box:
                    aj = box
                    ai = total - box
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = total
        dai = ai - alpha[i]
        daj = aj - alpha[j]
        alpha[i] = ai
        alpha[j] = aj
        for t in range(n):
            grad[t] = grad[t] + dai * q_matrix[i, t]
        for t in range(n):
            grad[t] = grad[t] + daj * q_matrix[j, t]
        n_iter += 1
    return alpha_arr, grad_arr, n_iter, converged
