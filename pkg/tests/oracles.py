"""Brute-force reference implementations the tests check the library against.

These recompute everything from first principles (per-threshold counting,
naive density sums, finite differences) without touching the library's fast
paths, so agreement is evidence rather than tautology.
"""

import math

import numpy as np


def eer_oracle(positives, negatives):
    """EER by explicit per-threshold error counting plus linear interpolation.

    Walks every distinct score as a threshold (accept when score >= t),
    counting errors directly, then interpolates between the two operating
    points where FAR - FRR changes sign. Counts stay integers until the
    final division, matching how any exact implementation must divide.
    """
    pos = np.asarray(positives, dtype=np.float64)
    neg = np.asarray(negatives, dtype=np.float64)
    thresholds = sorted(set(pos.tolist()) | set(neg.tolist()))
    thresholds.append(math.inf)
    rates = []
    for t in thresholds:
        frr = int((pos < t).sum()) / pos.size
        far = int((neg >= t).sum()) / neg.size
        rates.append((far, frr))
    for k in range(len(rates) - 1):
        far0, frr0 = rates[k]
        far1, frr1 = rates[k + 1]
        d0 = far0 - frr0
        d1 = far1 - frr1
        if d1 < 0.0:
            t = d0 / (d0 - d1)
            return far0 + t * (far1 - far0)
    raise AssertionError("FAR - FRR never went negative")


def adcf_oracle(tar, non, spf, prior_target=0.9, prior_nontarget=0.05,
                prior_spoof=0.05, cost_miss=1.0, cost_fa_nontarget=10.0,
                cost_fa_spoof=20.0):
    """Minimum normalised cost by explicit evaluation at every threshold.

    Returns (min_cost, threshold); ties resolve to the lowest threshold.
    """
    tar = np.asarray(tar, dtype=np.float64)
    non = np.asarray(non, dtype=np.float64)
    spf = np.asarray(spf, dtype=np.float64)
    pool = sorted(set(tar.tolist()) | set(non.tolist()) | set(spf.tolist()))
    thresholds = [-math.inf] + pool + [math.inf]
    w_miss = cost_miss * prior_target
    w_non = cost_fa_nontarget * prior_nontarget
    w_spf = cost_fa_spoof * prior_spoof
    normaliser = min(w_miss, w_non + w_spf)
    best_cost = None
    best_thr = None
    for t in thresholds:
        p_miss = int((tar < t).sum()) / tar.size
        p_fa_non = int((non >= t).sum()) / non.size
        p_fa_spf = int((spf >= t).sum()) / spf.size
        cost = (w_miss * p_miss + w_non * p_fa_non + w_spf * p_fa_spf) / normaliser
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_thr = t
    return best_cost, best_thr


def finite_difference_gradient(func, point, eps=1e-6):
    """Central-difference gradient of a scalar function of a 1-D array."""
    point = np.asarray(point, dtype=np.float64)
    grad = np.zeros_like(point)
    for i in range(point.size):
        up = point.copy()
        down = point.copy()
        up[i] += eps
        down[i] -= eps
        grad[i] = (func(up) - func(down)) / (2.0 * eps)
    return grad


def gmm_loglik_oracle(weights, means, variances, sample):
    """Naive mixture log-density of one sample: log sum_k w_k prod_d N(x_d)."""
    total = 0.0
    for w, mean, var in zip(weights, means, variances):
        dens = float(w)
        for x, m, v in zip(sample, mean, var):
            dens *= math.exp(-0.5 * (x - m) ** 2 / v) / math.sqrt(2.0 * math.pi * v)
        total += dens
    return math.log(total)


def svm_dual_checks(kernel, labels, alpha, box):
    """Recompute SVM dual feasibility and the KKT gap from scratch.

    Returns (max_box_violation, equality_residual, kkt_gap) where the KKT
    gap is the max over ascent-feasible points of -y*grad minus the min over
    descent-feasible points, with grad rebuilt as Q @ alpha - 1.
    """
    labels = np.asarray(labels, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    q = kernel * np.outer(labels, labels)
    grad = q @ alpha - 1.0
    minus_yg = -(labels * grad)
    box_violation = max(float((-alpha).max()), float((alpha - box).max()))
    equality = float(abs((alpha * labels).sum()))
    up = ((labels > 0) & (alpha < box)) | ((labels < 0) & (alpha > 0))
    low = ((labels > 0) & (alpha > 0)) | ((labels < 0) & (alpha < box))
    gap = float(minus_yg[up].max() - minus_yg[low].min())
    return box_violation, equality, gap
