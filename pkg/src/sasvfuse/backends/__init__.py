"""Fusion back-ends: logistic regression, polynomial-kernel SVM, Gaussian LLR."""

from .gmm import GaussianBackend, GmmParams, gaussian_backend_llr, gmm_loglik, train_gmm_em
from .lr import (
    LR_DEFAULT_GRID,
    LinearModel,
    cv_select_lr,
    lr_decision,
    lr_gradient,
    lr_objective,
    stratified_folds,
    train_lr,
)
from .serialize import load_model, model_from_doc, model_to_doc, save_model
from .svm import (
    SMO_BACKEND,
    KernelModel,
    PolyKernelParams,
    poly_kernel,
    resolve_poly_params,
    svm_decision,
    train_svm_smo,
)

__all__ = [
    "GaussianBackend",
    "GmmParams",
    "gaussian_backend_llr",
    "gmm_loglik",
    "train_gmm_em",
    "LR_DEFAULT_GRID",
    "LinearModel",
    "cv_select_lr",
    "lr_decision",
    "lr_gradient",
    "lr_objective",
    "stratified_folds",
    "train_lr",
    "load_model",
    "model_from_doc",
    "model_to_doc",
    "save_model",
    "SMO_BACKEND",
    "KernelModel",
    "PolyKernelParams",
    "poly_kernel",
    "resolve_poly_params",
    "svm_decision",
    "train_svm_smo",
]
