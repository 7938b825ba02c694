"""Soft-margin SVM with a polynomial kernel, trained by an SMO core.

The compiled core is used when the extension built; setting the environment
variable SASVFUSE_PURE_SMO=1 (or a failed build) selects the pure-numpy
twin. Both produce bit-identical solutions, so model files and fused scores
do not depend on which one ran.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from . import _smo_py

if os.environ.get("SASVFUSE_PURE_SMO"):
    _smo_impl = _smo_py
else:
    try:
        from . import _smo as _smo_impl
    except ImportError:
        _smo_impl = _smo_py

SMO_BACKEND = _smo_impl.BACKEND_NAME


@dataclass(frozen=True)
class PolyKernelParams:
    """Kernel (gamma * <x, z> + coef0) ** degree plus the box penalty."""

    degree: int = 3
    gamma: float = 1.0
    coef0: float = 1.0
    box: float = 1.0

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 1:
            raise DataError(f"degree must be a positive integer, got {self.degree!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise DataError(f"gamma must be positive, got {self.gamma!r}")
        if not math.isfinite(self.coef0):
            raise DataError(f"coef0 must be finite, got {self.coef0!r}")
        if not (math.isfinite(self.box) and self.box > 0.0):
            raise DataError(f"box penalty must be positive, got {self.box!r}")


def resolve_poly_params(features, degree=3, gamma=None, coef0=1.0, box=1.0):
    """Fill in the data-dependent default gamma = 1 / (n_dims * var(features))."""
    if gamma is None:
        features = np.asarray(features, dtype=np.float64)
        spread = float(features.var())
        if spread <= 0.0:
            raise DataError("features have zero variance; supply gamma explicitly")
        gamma = 1.0 / (features.shape[1] * spread)
    return PolyKernelParams(degree=degree, gamma=gamma, coef0=coef0, box=box)


def poly_kernel(left, right, params):
    """Gram matrix between row sets, shape (len(left), len(right))."""
    left = np.atleast_2d(np.asarray(left, dtype=np.float64))
    right = np.atleast_2d(np.asarray(right, dtype=np.float64))
    return (params.gamma * (left @ right.T) + params.coef0) ** params.degree


@dataclass
class KernelModel:
    """Sparse dual solution: f(x) = sum_i dual_coefs[i] K(sv_i, x) + bias."""

    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    kernel: PolyKernelParams
    n_iter: int = 0
    converged: bool = True


def _bias_from_solution(labels, alpha, grad, box):
    """Offset choice: mean over free vectors, else midpoint of the KKT bounds."""
    yg = labels * grad
    free = (alpha > 0.0) & (alpha < box)
    if free.any():
        return float(-yg[free].mean())
    upper_set = ((labels > 0.0) & (alpha <= 0.0)) | ((labels <= 0.0) & (alpha >= box))
    lower_set = ((labels > 0.0) & (alpha >= box)) | ((labels <= 0.0) & (alpha <= 0.0))
    upper = float(yg[upper_set].min()) if upper_set.any() else math.inf
    lower = float(yg[lower_set].max()) if lower_set.any() else -math.inf
    if not (math.isfinite(upper) and math.isfinite(lower)):
        return 0.0
    return float(-(upper + lower) / 2.0)


def train_svm_smo(features, labels, params=None, tol=1e-3, max_iter=1_000_000):
    """Solve the dual on the full Gram matrix and keep the support vectors.

    Labels must be +-1 with both classes present. Stops when the maximal
    KKT violating pair is within tol; hitting the iteration cap warns and
    sets converged=False.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if features.ndim != 2:
        raise DataError("feature matrix must be 2-D")
    if labels.shape != (features.shape[0],):
        raise DataError("labels must be one per feature row")
    if not np.isfinite(features).all():
        raise DataError("non-finite feature values")
    present = np.unique(labels)
    if not np.isin(present, [-1.0, 1.0]).all():
        raise DataError(f"labels must be -1/+1, got values {present}")
    if present.size < 2:
        raise DataError("training data contains a single class")
    if params is None:
        params = resolve_poly_params(features)

    # overflow surfaces as the DataError below, not as a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        gram = poly_kernel(features, features, params)
    if not np.isfinite(gram).all():
        raise DataError(
            "non-finite kernel values; rescale the features or lower the degree"
        )
    q_matrix = np.ascontiguousarray(gram * np.outer(labels, labels))
    alpha, grad, n_iter, converged = _smo_impl.smo_solve(
        q_matrix, np.ascontiguousarray(labels), params.box, tol, max_iter
    )
    if not converged:
        warnings.warn(
            f"SMO hit the {max_iter}-iteration cap before the {tol} KKT tolerance",
            RuntimeWarning,
        )
    bias = _bias_from_solution(labels, alpha, grad, params.box)
    support = alpha > 0.0
    if not support.any():
        # Degenerate but legal: keep one vector with zero weight so the
        # decision function is well-formed (constant bias).
        support = np.zeros_like(support)
        support[0] = True
    return KernelModel(
        support_vectors=features[support].copy(),
        dual_coefs=(alpha[support] * labels[support]),
        bias=bias,
        kernel=params,
        n_iter=int(n_iter),
        converged=bool(converged),
    )


def svm_decision(model, features):
    """Signed decision values for a feature matrix (or one feature vector)."""
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    if single:
        features = features[None, :]
    gram = poly_kernel(model.support_vectors, features, model.kernel)
    scores = model.dual_coefs @ gram + model.bias
    return float(scores[0]) if single else scores
