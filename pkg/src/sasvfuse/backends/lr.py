"""Binary logistic regression trained by damped Newton iterations.

The objective is the sum-form negative log-likelihood plus an L2 penalty on
the weights only; the bias is never regularised, so under an enormous
penalty the model degenerates to the class-prior logit as it should.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..seeding import derived_rng

LR_DEFAULT_GRID = tuple(10.0 ** k for k in range(-4, 5))

_ARMIJO_C = 1e-4
_MAX_HALVINGS = 60


@dataclass
class LinearModel:
    """Affine decision function score(x) = w . x + b (the logit)."""

    weights: np.ndarray
    bias: float
    reg_strength: float
    n_iter: int = 0
    converged: bool = True


def _check_training_inputs(features, labels):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if features.ndim != 2:
        raise DataError("feature matrix must be 2-D")
    if labels.shape != (features.shape[0],):
        raise DataError("labels must be one per feature row")
    if features.shape[0] == 0:
        raise DataError("empty training set")
    if not np.isfinite(features).all():
        raise DataError("non-finite feature values")
    present = np.unique(labels)
    if not np.isin(present, [0.0, 1.0]).all():
        raise DataError(f"labels must be 0/1, got values {present}")
    if present.size < 2:
        raise DataError("training data contains a single class")
    return features, labels


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lr_objective(weights, bias, features, labels, reg_strength):
    """Penalised NLL: sum(log(1+e^z) - y*z) + reg/2 * ||w||^2 (bias free)."""
    z = features @ weights + bias
    nll = np.logaddexp(0.0, z).sum() - labels @ z
    return float(nll + 0.5 * reg_strength * (weights @ weights))


def lr_gradient(weights, bias, features, labels, reg_strength):
    """Analytic gradient of lr_objective wrt (weights, bias)."""
    z = features @ weights + bias
    residual = _sigmoid(z) - labels
    grad_w = features.T @ residual + reg_strength * weights
    grad_b = float(residual.sum())
    return grad_w, grad_b


def train_lr(features, labels, reg_strength=1.0, tol=1e-8, max_iter=10000):
    """Fit by Newton's method with Armijo backtracking.

    Stops when the gradient infinity-norm drops to tol; hitting the
    iteration cap leaves converged=False and emits a warning rather than
    raising.
    """
    features, labels = _check_training_inputs(features, labels)
    if not (np.isfinite(reg_strength) and reg_strength > 0.0):
        raise DataError(f"regularisation strength must be positive, got {reg_strength}")
    n, d = features.shape
    design = np.hstack([features, np.ones((n, 1))])
    reg_mask = np.append(np.full(d, reg_strength), 0.0)
    theta = np.zeros(d + 1)

    def objective(t):
        return lr_objective(t[:d], t[d], features, labels, reg_strength)

    def gradient(t):
        return design.T @ (_sigmoid(design @ t) - labels) + reg_mask * t

    value = objective(theta)
    grad = gradient(theta)
    n_iter = 0
    converged = False
    stalled = False
    for n_iter in range(1, max_iter + 1):
        grad_norm = float(np.abs(grad).max())
        if grad_norm <= tol:
            n_iter -= 1
            converged = True
            break
        prob = _sigmoid(design @ theta)
        # Floor keeps the Hessian positive definite when every sigmoid
        # saturates (separable data, unregularised bias); it damps the step
        # without moving the optimum.
        curvature = np.maximum(prob * (1.0 - prob), 1e-10)
        hessian = design.T @ (design * curvature[:, None])
        hessian[np.diag_indices_from(hessian)] += reg_mask
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.pinv(hessian) @ grad
        slope = float(grad @ step)
        if slope <= 0.0:
            step = grad
            slope = float(grad @ grad)
        # Near the optimum, objective differences underflow before the
        # gradient tolerance is met, so a full step that clearly shrinks the
        # gradient is accepted without consulting the objective.
        full = theta - step
        full_grad = gradient(full)
        if float(np.abs(full_grad).max()) <= 0.5 * grad_norm:
            theta = full
            grad = full_grad
            value = objective(theta)
            continue
        scale = 1.0
        for _ in range(_MAX_HALVINGS):
            candidate = theta - scale * step
            new_value = objective(candidate)
            if new_value <= value - _ARMIJO_C * scale * slope:
                break
            scale *= 0.5
        else:
            stalled = True
            break
        theta = candidate
        value = new_value
        grad = gradient(theta)
    else:
        warnings.warn(
            f"logistic regression hit the {max_iter}-iteration cap", RuntimeWarning
        )
    if not converged:
        converged = bool(np.abs(gradient(theta)).max() <= tol)
        if not converged and stalled:
            warnings.warn(
                "logistic regression line search stalled before reaching "
                "the gradient tolerance",
                RuntimeWarning,
            )
    return LinearModel(
        weights=theta[:d].copy(),
        bias=float(theta[d]),
        reg_strength=float(reg_strength),
        n_iter=n_iter,
        converged=converged,
    )


def lr_decision(model, features):
    """Logit scores for a feature matrix (or a single feature vector)."""
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    if single:
        features = features[None, :]
    scores = features @ model.weights + model.bias
    return float(scores[0]) if single else scores


def stratified_folds(labels, k, seed):
    """Deal each class's shuffled indices round-robin into k folds."""
    labels = np.asarray(labels)
    if k < 2:
        raise DataError(f"need at least 2 folds, got {k}")
    rng = derived_rng(seed) if isinstance(seed, (int, np.integer)) else np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    for cls in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def cv_select_lr(features, labels, grid=LR_DEFAULT_GRID, k=10, seed=0):
    """Pick the penalty by k-fold CV on mean validation NLL, then refit on all data.

    Folds are stratified per class; ties on the CV loss go to the smaller
    penalty. Requires at least two examples of each class.
    """
    features, labels = _check_training_inputs(features, labels)
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise DataError("empty penalty grid")
    for g in grid:
        if not (np.isfinite(g) and g > 0.0):
            raise DataError(f"penalty grid values must be positive, got {g}")
    if len(features) < k:
        raise DataError(f"{len(features)} examples cannot fill {k} folds")
    for cls in (0.0, 1.0):
        if int((labels == cls).sum()) < 2:
            raise DataError(
                "cannot stratify: fewer than 2 examples of one class"
            )
    folds = stratified_folds(labels, k, seed)
    all_idx = np.arange(len(labels))
    best_reg = None
    best_loss = np.inf
    for reg in sorted(grid):
        fold_losses = []
        for fold in folds:
            if fold.size == 0:
                continue
            train_idx = np.setdiff1d(all_idx, fold, assume_unique=True)
            model = train_lr(features[train_idx], labels[train_idx], reg)
            z = features[fold] @ model.weights + model.bias
            nll = np.logaddexp(0.0, z) - labels[fold] * z
            fold_losses.append(float(nll.mean()))
        loss = float(np.mean(fold_losses))
        if loss < best_loss:
            best_loss = loss
            best_reg = reg
    return train_lr(features, labels, best_reg)
