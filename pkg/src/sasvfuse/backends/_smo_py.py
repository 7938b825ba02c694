"""Pure-numpy SMO core; the fallback for the compiled extension.

Every floating-point operation here mirrors the compiled loop one-for-one
(same expressions, same order, elementwise only), so both cores produce
bit-identical duals on the same problem. Keep the two files in sync.
"""

import numpy as np

_TAU = 1e-12

BACKEND_NAME = "python"


def smo_solve(q_matrix, labels, box, tol, max_iter):
    """Maximal-violating-pair SMO for the standard dual with equality constraint.

    q_matrix is the label-signed kernel matrix, labels are +-1 floats, box is
    the shared upper bound on the duals. Returns (alpha, grad, n_iter,
    converged) where grad is the final gradient of the dual objective.
    """
    n = labels.shape[0]
    alpha = np.zeros(n, dtype=np.float64)
    grad = np.full(n, -1.0, dtype=np.float64)
    positive = labels > 0.0
    negative = ~positive
    n_iter = 0
    converged = False
    while n_iter < max_iter:
        minus_yg = -(labels * grad)
        up = (positive & (alpha < box)) | (negative & (alpha > 0.0))
        low = (positive & (alpha > 0.0)) | (negative & (alpha < box))
        up_vals = np.where(up, minus_yg, -np.inf)
        low_vals = np.where(low, minus_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        if up_vals[i] - low_vals[j] <= tol:
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
        grad += dai * q_matrix[i]
        grad += daj * q_matrix[j]
        n_iter += 1
    return alpha, grad, n_iter, converged
