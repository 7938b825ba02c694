"""Kernel SVM trainer: dual feasibility, KKT conditions, kernel handling."""

import numpy as np
import pytest

from sasvfuse import DataError
from sasvfuse.backends import (
    PolyKernelParams,
    load_model,
    poly_kernel,
    resolve_poly_params,
    save_model,
    svm_decision,
    train_svm_smo,
)
from oracles import svm_dual_checks


def blob_problem(rng, n_per=25, gap=2.0, d=2):
    pos = rng.normal(gap / 2.0, 1.0, (n_per, d))
    neg = rng.normal(-gap / 2.0, 1.0, (n_per, d))
    features = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(n_per), -np.ones(n_per)])
    return features, labels


class TestKernel:
    def test_poly_kernel_values(self):
        params = PolyKernelParams(degree=2, gamma=0.5, coef0=1.0, box=1.0)
        left = np.array([[1.0, 2.0]])
        right = np.array([[3.0, -1.0]])
        # (0.5 * (1*3 + 2*-1) + 1)^2 = (1.5)^2
        assert poly_kernel(left, right, params)[0, 0] == pytest.approx(2.25)

    def test_gamma_default_scales_with_data(self, rng):
        features = rng.normal(0.0, 2.0, (50, 4))
        params = resolve_poly_params(features)
        want = 1.0 / (4 * features.var())
        assert params.gamma == pytest.approx(want)
        explicit = resolve_poly_params(features, gamma=0.25)
        assert explicit.gamma == 0.25

    def test_params_validated(self):
        with pytest.raises(DataError):
            PolyKernelParams(degree=0)
        with pytest.raises(DataError):
            PolyKernelParams(box=0.0)
        with pytest.raises(DataError):
            PolyKernelParams(gamma=-1.0)


class TestTrainSvm:
    def test_dual_feasibility_and_kkt(self, rng):
        for trial in range(6):
            features, labels = blob_problem(rng, n_per=20 + 5 * trial, gap=1.5)
            box = float(rng.uniform(0.3, 5.0))
            params = resolve_poly_params(features, degree=1 + trial % 3, box=box)
            model = train_svm_smo(features, labels, params)
            assert model.converged
            duals = model.dual_coefs
            # bound constraints hold exactly: 0 <= alpha <= box
            assert np.all(np.abs(duals) > 0.0)
            assert np.all(np.abs(duals) <= box + 1e-12)
            # equality constraint sum(alpha * y) == 0 up to accumulated rounding
            assert abs(duals.sum()) <= 1e-6
            # KKT stationarity gap at the solver's own tolerance
            gram = poly_kernel(features, features, params)
            alpha = np.zeros(len(labels))
            sv_rows = {tuple(row): i for i, row in enumerate(model.support_vectors)}
            for j, row in enumerate(features):
                hit = sv_rows.get(tuple(row))
                if hit is not None:
                    alpha[j] = abs(duals[hit])
            _, equality, gap = svm_dual_checks(gram, labels, alpha, box)
            assert equality <= 1e-6
            assert gap <= 1e-3

    def test_free_vector_margins(self, rng):
        features, labels = blob_problem(rng, n_per=30, gap=1.0)
        params = resolve_poly_params(features, degree=2, box=2.0)
        model = train_svm_smo(features, labels, params)
        duals = np.abs(model.dual_coefs)
        free = (duals > 1e-9) & (duals < 2.0 - 1e-9)
        if free.any():
            margins = svm_decision(model, model.support_vectors[free])
            signs = np.sign(model.dual_coefs[free])
            assert np.max(np.abs(signs * margins - 1.0)) <= 2e-3

    def test_mirrored_data_scores_zero_at_origin(self, rng):
        base = np.abs(rng.normal(1.0, 0.5, (15, 1))) + 0.1
        features = np.concatenate([base, -base])
        labels = np.concatenate([np.ones(15), -np.ones(15)])
        params = resolve_poly_params(features, degree=3, box=1.0)
        model = train_svm_smo(features, labels, params)
        at_origin = svm_decision(model, np.zeros((1, 1)))[0]
        assert abs(at_origin) <= 1e-6

    def test_xor_needs_higher_degree(self):
        features = np.array([[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
        labels = np.array([1.0, 1.0, -1.0, -1.0])
        cubic = train_svm_smo(
            features, labels, resolve_poly_params(features, degree=3, box=10.0)
        )
        assert np.all(np.sign(svm_decision(cubic, features)) == labels)
        linear = train_svm_smo(
            features, labels, resolve_poly_params(features, degree=1, box=10.0)
        )
        assert np.any(np.sign(svm_decision(linear, features)) != labels)

    def test_separable_blobs_classified(self, rng):
        features, labels = blob_problem(rng, n_per=40, gap=6.0)
        model = train_svm_smo(features, labels, resolve_poly_params(features))
        scores = svm_decision(model, features)
        assert np.mean(np.sign(scores) == labels) == 1.0

    def test_deterministic(self, rng):
        features, labels = blob_problem(rng, n_per=20)
        params = resolve_poly_params(features)
        m1 = train_svm_smo(features, labels, params)
        m2 = train_svm_smo(features, labels, params)
        assert np.array_equal(m1.dual_coefs, m2.dual_coefs)
        assert np.array_equal(m1.support_vectors, m2.support_vectors)
        assert m1.bias == m2.bias
        assert m1.n_iter == m2.n_iter

    def test_decision_batch_matches_single(self, rng):
        # BLAS may accumulate differently per shape, so allow rounding slack
        features, labels = blob_problem(rng, n_per=15)
        model = train_svm_smo(features, labels, resolve_poly_params(features))
        batch = svm_decision(model, features)
        for i in (0, 7, 29):
            single = svm_decision(model, features[i : i + 1])[0]
            assert single == pytest.approx(batch[i], rel=1e-12, abs=1e-12)

    def test_single_class_rejected(self, rng):
        features = rng.normal(0.0, 1.0, (10, 2))
        with pytest.raises(DataError):
            train_svm_smo(features, np.ones(10), resolve_poly_params(features))

    def test_bad_label_values_rejected(self, rng):
        features = rng.normal(0.0, 1.0, (4, 2))
        with pytest.raises(DataError):
            train_svm_smo(
                features, np.array([1.0, 0.0, 1.0, 0.0]), resolve_poly_params(features)
            )

    def test_non_finite_kernel_rejected(self):
        features = np.array([[1e200, 1e200], [-1e200, -1e200]])
        labels = np.array([1.0, -1.0])
        params = PolyKernelParams(degree=3, gamma=1.0, coef0=1.0, box=1.0)
        with pytest.raises(DataError, match="finite"):
            train_svm_smo(features, labels, params)

    def test_iteration_cap_warns(self, rng):
        features, labels = blob_problem(rng, n_per=30, gap=0.5)
        params = resolve_poly_params(features, box=10.0)
        with pytest.warns(RuntimeWarning):
            model = train_svm_smo(features, labels, params, max_iter=3)
        assert not model.converged

    def test_serialise_round_trip(self, rng, tmp_path):
        features, labels = blob_problem(rng, n_per=12)
        model = train_svm_smo(features, labels, resolve_poly_params(features))
        path = tmp_path / "svm.json"
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(
            svm_decision(back, features), svm_decision(model, features)
        )
