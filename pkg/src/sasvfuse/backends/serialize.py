"""JSON (de)serialisation for trained back-end models.

Floats go through Python's shortest round-trip repr, so a save/load cycle
reproduces decision values exactly, not just to tolerance.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import DataError
from .gmm import GaussianBackend, GmmParams
from .lr import LinearModel
from .svm import KernelModel, PolyKernelParams

KIND_LINEAR = "linear"
KIND_POLY_SVM = "poly_svm"
KIND_GAUSSIAN = "gaussian_backend"


def _gmm_to_doc(params):
    return {
        "weights": params.weights.tolist(),
        "means": params.means.tolist(),
        "covariances": params.covariances.tolist(),
    }


def _gmm_from_doc(doc):
    return GmmParams(
        weights=np.asarray(doc["weights"], dtype=np.float64),
        means=np.asarray(doc["means"], dtype=np.float64),
        covariances=np.asarray(doc["covariances"], dtype=np.float64),
    )


def model_to_doc(model):
    """Dict document (kind tag + parameters) for any supported model."""
    if isinstance(model, LinearModel):
        return {
            "kind": KIND_LINEAR,
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "reg_strength": model.reg_strength,
        }
    if isinstance(model, KernelModel):
        return {
            "kind": KIND_POLY_SVM,
            "support_vectors": model.support_vectors.tolist(),
            "dual_coefs": model.dual_coefs.tolist(),
            "bias": model.bias,
            "kernel": {
                "degree": model.kernel.degree,
                "gamma": model.kernel.gamma,
                "coef0": model.kernel.coef0,
                "box": model.kernel.box,
            },
        }
    if isinstance(model, GaussianBackend):
        return {
            "kind": KIND_GAUSSIAN,
            "target": _gmm_to_doc(model.gmm_target),
            "nontarget": _gmm_to_doc(model.gmm_nontarget),
            "spoof": _gmm_to_doc(model.gmm_spoof),
            "neg_weights": list(model.neg_weights),
        }
    raise DataError(f"cannot serialise model of type {type(model).__name__}")


def model_from_doc(doc):
    """Inverse of model_to_doc."""
    if not isinstance(doc, dict):
        raise DataError(f"model document must be an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind == KIND_LINEAR:
        return LinearModel(
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            reg_strength=float(doc["reg_strength"]),
        )
    if kind == KIND_POLY_SVM:
        k = doc["kernel"]
        return KernelModel(
            support_vectors=np.asarray(doc["support_vectors"], dtype=np.float64),
            dual_coefs=np.asarray(doc["dual_coefs"], dtype=np.float64),
            bias=float(doc["bias"]),
            kernel=PolyKernelParams(
                degree=int(k["degree"]),
                gamma=float(k["gamma"]),
                coef0=float(k["coef0"]),
                box=float(k["box"]),
            ),
        )
    if kind == KIND_GAUSSIAN:
        return GaussianBackend(
            gmm_target=_gmm_from_doc(doc["target"]),
            gmm_nontarget=_gmm_from_doc(doc["nontarget"]),
            gmm_spoof=_gmm_from_doc(doc["spoof"]),
            neg_weights=tuple(doc["neg_weights"]),
        )
    raise DataError(f"unknown model kind {kind!r}")


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(model_to_doc(model), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_doc(json.load(handle))
