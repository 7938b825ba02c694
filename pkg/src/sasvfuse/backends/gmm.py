"""Diagonal-covariance Gaussian mixtures and the three-class LLR back-end."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..seeding import derived_rng

_LOG_2PI = math.log(2.0 * math.pi)
# Relative floor applied to every mixture variance, anchored to the data spread.
_VAR_FLOOR_FRACTION = 1e-6


@dataclass
class GmmParams:
    """One diagonal-covariance mixture: weights (k,), means (k,d), variances (k,d)."""

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    loglik_history: tuple = ()
    converged: bool = True

    @property
    def n_components(self):
        return self.weights.shape[0]


@dataclass
class GaussianBackend:
    """Per-class mixtures producing a target-vs-rest log-likelihood ratio."""

    gmm_target: GmmParams
    gmm_nontarget: GmmParams
    gmm_spoof: GmmParams
    neg_weights: tuple = (0.5, 0.5)

    def __post_init__(self):
        self.neg_weights = tuple(float(w) for w in self.neg_weights)
        if len(self.neg_weights) != 2:
            raise DataError("neg_weights must be (nontarget, spoof)")
        if any(w < 0.0 for w in self.neg_weights):
            raise DataError(f"negative mixing weight in {self.neg_weights!r}")
        if abs(sum(self.neg_weights) - 1.0) > 1e-9:
            raise DataError(f"mixing weights {self.neg_weights!r} must sum to 1")


def _check_data(data):
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise DataError("mixture training data must be 2-D")
    if data.shape[0] == 0:
        raise DataError("empty mixture training set")
    if not np.isfinite(data).all():
        raise DataError("non-finite values in mixture training data")
    return data


def _log_gauss_diag(data, means, variances):
    """Per-sample, per-component Gaussian log-densities, shape (n, k)."""
    inv = 1.0 / variances
    quad = (
        (data * data) @ inv.T
        - 2.0 * (data @ (means * inv).T)
        + ((means * means) * inv).sum(axis=1)
    )
    log_norm = 0.5 * (np.log(variances).sum(axis=1) + means.shape[1] * _LOG_2PI)
    return -0.5 * quad - log_norm


def kmeanspp_means(data, n_components, rng):
    """Seeded k-means++ style spread: distance-squared proportional picks."""
    n = data.shape[0]
    chosen = [int(rng.integers(n))]
    dist2 = ((data - data[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < n_components:
        total = float(dist2.sum())
        if total <= 0.0:
            # All remaining mass sits on already-chosen points; fall back to uniform.
            probs = np.full(n, 1.0 / n)
        else:
            probs = dist2 / total
        nxt = int(rng.choice(n, p=probs))
        chosen.append(nxt)
        dist2 = np.minimum(dist2, ((data - data[nxt]) ** 2).sum(axis=1))
    return data[np.array(chosen, dtype=np.intp)].copy()


def train_gmm_em(data, n_components=3, seed=0, max_iter=200, tol=1e-6):
    """Fit a diagonal GMM by EM.

    Initialisation is k-means++ means, uniform weights, and the per-dimension
    data variance as every component's covariance. Stops when the total
    log-likelihood gain falls below tol. The log-likelihood history (one
    entry per E-step) is kept on the returned params.
    """
    data = _check_data(data)
    n, d = data.shape
    if n_components < 1:
        raise DataError(f"need at least 1 component, got {n_components}")
    if n < n_components:
        raise DataError(f"{n} samples cannot support {n_components} components")
    rng = derived_rng(seed) if isinstance(seed, (int, np.integer)) else np.random.default_rng(seed)

    data_var = data.var(axis=0)
    floor = np.where(data_var > 0.0, _VAR_FLOOR_FRACTION * data_var, 1e-12)

    means = kmeanspp_means(data, n_components, rng)
    variances = np.tile(np.maximum(data_var, floor), (n_components, 1))
    weights = np.full(n_components, 1.0 / n_components)

    history = []
    converged = False
    for _ in range(max_iter):
        # E-step in the log domain.
        log_joint = _log_gauss_diag(data, means, variances) + np.log(weights)
        log_total = np.logaddexp.reduce(log_joint, axis=1)
        history.append(float(log_total.sum()))
        resp = np.exp(log_joint - log_total[:, None])
        if len(history) >= 2 and history[-1] - history[-2] < tol:
            converged = True
            break
        # M-step.
        nk = np.maximum(resp.sum(axis=0), 1e-300)
        weights = nk / n
        means = (resp.T @ data) / nk[:, None]
        second = (resp.T @ (data * data)) / nk[:, None]
        variances = np.maximum(second - means * means, floor)
    else:
        warnings.warn(
            f"EM hit the {max_iter}-iteration cap before the {tol} gain tolerance",
            RuntimeWarning,
        )
    return GmmParams(
        weights=weights,
        means=means,
        covariances=variances,
        loglik_history=tuple(history),
        converged=converged,
    )


def gmm_loglik(params, data):
    """Total mixture log-density per sample; accepts one vector or a matrix."""
    data = np.asarray(data, dtype=np.float64)
    single = data.ndim == 1
    if single:
        data = data[None, :]
    want = np.asarray(params.means).shape[1]
    if data.ndim != 2 or data.shape[1] != want:
        raise DataError(
            f"scoring data has shape {data.shape}, mixture expects {want} dims"
        )
    log_joint = _log_gauss_diag(data, params.means, params.covariances) + np.log(
        params.weights
    )
    out = np.logaddexp.reduce(log_joint, axis=1)
    return float(out[0]) if single else out


def gaussian_backend_llr(backend, data):
    """log p(x|target) - log of the weighted nontarget/spoof mixture density."""
    w_non, w_spf = backend.neg_weights
    if w_non < 0.0 or w_spf < 0.0 or w_non + w_spf <= 0.0:
        raise DataError(f"bad negative-class weights {backend.neg_weights!r}")
    data = np.asarray(data, dtype=np.float64)
    single = data.ndim == 1
    if single:
        data = data[None, :]
    ll_tar = gmm_loglik(backend.gmm_target, data)
    parts = []
    if w_non > 0.0:
        parts.append(math.log(w_non) + gmm_loglik(backend.gmm_nontarget, data))
    if w_spf > 0.0:
        parts.append(math.log(w_spf) + gmm_loglik(backend.gmm_spoof, data))
    ll_neg = parts[0] if len(parts) == 1 else np.logaddexp(parts[0], parts[1])
    out = ll_tar - ll_neg
    return float(out[0]) if single else out
