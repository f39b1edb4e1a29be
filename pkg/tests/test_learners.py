"""
学习器测试：线性 ERM、核岭分类、kNN、交叉验证、模型记录

Author: gngdingghuan
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.dataset import Dataset
from core.objects import StructuredObject, SymbolString
from core.synthetic import gen_synthetic
from distances import cross_distances, pairwise_distances
from embedding import dsk_kernel, features_from_distances
from learners import (
    KnnModel,
    LearnerSpec,
    LinearModel,
    accuracy,
    cross_validate,
    decision_scores,
    expand_grid,
    knn_predict,
    knn_predict_many,
    linear_objective,
    load_model_record,
    one_vs_rest_targets,
    predict_kernel,
    predict_linear,
    save_model_record,
    train_kernel,
    train_linear,
)
from sampling import default_distribution, sample_omegas
from utils.error_handler import (
    DataFormatError,
    DimensionMismatchError,
    InfeasibleSplitError,
    InvalidInputError,
    KindMismatchError,
    SingularSystemError,
)


@pytest.fixture
def blobs():
    """三类高斯团的特征与标签"""
    rng = np.random.default_rng(0)
    centers = np.array([[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
    labels = np.repeat(np.arange(3), 15)
    features = centers[labels] + rng.normal(0.0, 0.4, size=(45, 3))
    return features, labels


def _strings(texts, labels, alphabet="ab"):
    objects = tuple(StructuredObject(SymbolString.from_text(t, alphabet)) for t in texts)
    return Dataset(objects, np.array(labels), metadata={"alphabet": alphabet})


class TestLinearObjective:
    """目标函数与梯度"""

    @pytest.mark.parametrize("loss,step,tol", [("logistic", 1e-5, 1e-6), ("hinge-squared", 1e-6, 1e-5)])
    def test_gradient_matches_finite_differences(self, blobs, loss, step, tol):
        features, labels = blobs
        targets = np.where(labels == 1, 1.0, -1.0)
        rng = np.random.default_rng(1)
        for _ in range(5):
            w = rng.normal(size=3)
            _, grad = linear_objective(w, features, targets, 0.1, loss)
            numeric = np.zeros(3)
            for k in range(3):
                e = np.zeros(3)
                e[k] = step
                plus, _ = linear_objective(w + e, features, targets, 0.1, loss)
                minus, _ = linear_objective(w - e, features, targets, 0.1, loss)
                numeric[k] = (plus - minus) / (2 * step)
            assert np.max(np.abs(numeric - grad)) <= tol * max(1.0, np.max(np.abs(grad)))

    @pytest.mark.parametrize("loss", ["logistic", "hinge-squared"])
    def test_convexity(self, blobs, loss):
        features, labels = blobs
        targets = np.where(labels == 0, 1.0, -1.0)
        rng = np.random.default_rng(2)
        for _ in range(20):
            a, b = rng.normal(size=3) * 3, rng.normal(size=3) * 3
            fa, _ = linear_objective(a, features, targets, 0.01, loss)
            fb, _ = linear_objective(b, features, targets, 0.01, loss)
            fm, _ = linear_objective(0.5 * (a + b), features, targets, 0.01, loss)
            assert fm <= 0.5 * (fa + fb) + 1e-10


class TestTrainLinear:
    """线性模型训练"""

    def test_multiclass_fits_blobs(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e-3, loss="hinge-squared")
        assert model.weights.shape == (3, 3)
        assert accuracy(predict_linear(model, features), labels) >= 0.9
        assert len(model.training_log["iterations"]) == 3

    @pytest.mark.parametrize("loss", ["logistic", "hinge-squared"])
    def test_trace_monotone(self, blobs, loss):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e-2, loss=loss)
        for trace in model.training_log["trace"]:
            assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
            assert trace[-1] <= trace[0]

    def test_objective_not_above_zero_weights(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=0.5, loss="logistic")
        for c in range(3):
            targets = np.where(labels == c, 1.0, -1.0)
            at_w, _ = linear_objective(model.weights[c], features, targets, 0.5, "logistic")
            at_zero, _ = linear_objective(np.zeros(3), features, targets, 0.5, "logistic")
            assert at_w <= at_zero

    def test_stop_reason_reported(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e-2, loss="logistic", max_iter=1, tol=1e-12)
        assert not model.training_log["converged"]
        assert all(reason == "max-iter" for reason in model.training_log["stop_reason"])

    def test_large_mu_shrinks_weights(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e6)
        assert np.linalg.norm(model.weights, axis=1).max() <= 1e-3

    def test_two_point_problem(self):
        features = np.array([[1.0, 0.0], [0.0, 1.0]])
        model = train_linear(features, [0, 1], mu=1e-3, loss="logistic")
        assert model.weights.shape == (1, 2)
        assert predict_linear(model, features).tolist() == [0, 1]

    def test_deterministic(self, blobs):
        features, labels = blobs
        a = train_linear(features, labels, mu=1e-2)
        b = train_linear(features, labels, mu=1e-2)
        assert np.array_equal(a.weights, b.weights)

    def test_errors(self, blobs):
        features, labels = blobs
        with pytest.raises(InvalidInputError):
            train_linear(features, np.zeros(45, dtype=int), mu=1.0)
        with pytest.raises(InvalidInputError):
            train_linear(features, labels, mu=0.0)
        with pytest.raises(InvalidInputError):
            train_linear(features[:1], labels[:1], mu=1.0)
        bad = features.copy()
        bad[0, 0] = np.nan
        with pytest.raises(InvalidInputError):
            train_linear(bad, labels, mu=1.0)
        with pytest.raises(DimensionMismatchError):
            train_linear(features, labels[:10], mu=1.0)

    def test_dict_round_trip(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e-2)
        record = json.loads(json.dumps(model.to_dict()))
        assert "trace" not in record["training_log"]
        restored = LinearModel.from_dict(record)
        assert np.array_equal(predict_linear(restored, features), predict_linear(model, features))


class TestPredictLinear:
    """线性预测"""

    def test_zero_weights_predict_class_zero(self):
        features = np.random.default_rng(3).normal(size=(6, 4))
        assert predict_linear(LinearModel(np.zeros((3, 4)), 1.0, "logistic", 3), features).tolist() == [0] * 6
        assert predict_linear(LinearModel(np.zeros((1, 4)), 1.0, "logistic", 2), features).tolist() == [0] * 6

    def test_binary_scores(self):
        model = LinearModel(np.array([[1.0, -1.0]]), 1.0, "logistic", 2)
        scores = decision_scores(model, np.array([[2.0, 1.0]]))
        assert scores.tolist() == [[0.0, 1.0]]

    def test_positive_scaling_invariance(self, blobs):
        features, labels = blobs
        model = train_linear(features, labels, mu=1e-2)
        base = decision_scores(model, features)
        assert np.allclose(decision_scores(model, 3.5 * features), 3.5 * base)
        assert np.array_equal(predict_linear(model, 3.5 * features), predict_linear(model, features))

    def test_class_permutation(self):
        rng = np.random.default_rng(4)
        weights = rng.normal(size=(4, 5))
        features = rng.normal(size=(30, 5))
        perm = np.array([2, 0, 3, 1])
        original = predict_linear(LinearModel(weights, 1.0, "logistic", 4), features)
        permuted = predict_linear(LinearModel(weights[perm], 1.0, "logistic", 4), features)
        assert np.array_equal(perm[permuted], original)

    def test_width_mismatch(self):
        model = LinearModel(np.zeros((1, 4)), 1.0, "logistic", 2)
        with pytest.raises(DimensionMismatchError):
            predict_linear(model, np.zeros((2, 3)))

    def test_weight_count_checked(self):
        with pytest.raises(InvalidInputError):
            LinearModel(np.zeros((2, 4)), 1.0, "logistic", 3)


class TestKernelRidge:
    """预计算核上的核岭分类"""

    def test_identity_kernel(self):
        labels = np.array([0, 1, 0, 1])
        model = train_kernel(np.eye(4), labels, lam=1.0)
        assert np.allclose(model.coefficients, one_vs_rest_targets(labels, 2) / 2.0)
        assert model.coefficients.shape == (4, 2)

    def test_diagonal_dominant_predicts_training_labels(self):
        rng = np.random.default_rng(5)
        noise = rng.normal(0.0, 0.1, size=(8, 8))
        K = 5.0 * np.eye(8) + 0.5 * (noise + noise.T)
        labels = np.array([0, 1, 2, 0, 1, 2, 0, 1])
        model = train_kernel(K, labels, lam=0.1)
        expected = np.linalg.solve(K + 0.1 * np.eye(8), one_vs_rest_targets(labels, 3))
        assert np.allclose(model.coefficients, expected)
        assert predict_kernel(model, K).tolist() == labels.tolist()

    def test_indefinite_kernel_with_large_lambda(self):
        data = gen_synthetic("shifted-sine", 12, seed=2)
        K = dsk_kernel("dsk-nd", 1.0, pairwise_distances(data.objects, "dtw"))
        assert K.min_eigenvalue() < 0
        lam = 2.0 * np.abs(np.linalg.eigvalsh(K.values)).max() + 1.0
        model = train_kernel(K, data.labels, lam=lam)
        assert np.all(np.isfinite(model.coefficients))
        assert model.construction.value == "dsk-nd"

    def test_singular_system(self):
        with pytest.raises(SingularSystemError):
            train_kernel(-np.eye(3), [0, 1, 0], lam=1.0)

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            train_kernel(np.eye(3), [0, 1, 0], lam=0.0)
        with pytest.raises(DimensionMismatchError):
            train_kernel(np.eye(3), [0, 1], lam=1.0)
        model = train_kernel(np.eye(3), [0, 1, 0], lam=1.0)
        with pytest.raises(DimensionMismatchError):
            predict_kernel(model, np.zeros((1, 4)))


class TestKnn:
    """k 近邻"""

    @pytest.fixture
    def train(self):
        return _strings(["aa", "ab", "bb"], [0, 0, 1])

    def test_majority_vote(self, train):
        query = StructuredObject(SymbolString.from_text("ba", "ab"))
        assert knn_predict(KnnModel(train, 3, "edit"), query) == 0

    def test_exact_match_k1(self, train):
        for obj, label in zip(train.objects, train.labels):
            assert knn_predict(KnnModel(train, 1, "edit"), obj) == label

    def test_k_equals_n_is_global_majority(self):
        data = gen_synthetic("two-cluster", 9, seed=1)
        majority = int(np.argmax(np.bincount(data.labels)))
        predictions = knn_predict_many(KnnModel(data, 9, "mod-hausdorff"), data.objects)
        assert predictions.tolist() == [majority] * 9

    def test_distance_tie_prefers_lower_index(self):
        train = _strings(["ab", "ba"], [1, 0])
        query = StructuredObject(SymbolString.from_text("aa", "ab"))
        assert knn_predict(KnnModel(train, 1, "edit"), query) == 1

    def test_vote_tie_prefers_lower_class(self):
        train = _strings(["ab", "ba"], [1, 0])
        query = StructuredObject(SymbolString.from_text("aa", "ab"))
        assert knn_predict(KnnModel(train, 2, "edit"), query) == 0

    def test_duplicated_training_point(self):
        train = _strings(["abab", "abab", "bbbb"], [1, 1, 0])
        assert knn_predict(KnnModel(train, 1, "edit"), train.objects[1]) == 1

    def test_errors(self, train):
        with pytest.raises(InvalidInputError):
            KnnModel(train, 4, "edit")
        with pytest.raises(KindMismatchError):
            KnnModel(train, 1, "dtw")
        with pytest.raises(KindMismatchError):
            knn_predict(KnnModel(train, 1, "edit"), StructuredObject.time_series([1.0]))


class TestCrossValidation:
    """交叉验证与网格选择"""

    @pytest.fixture
    def labels_data(self):
        data = gen_synthetic("motif-string", 40, seed=3)
        return data

    @staticmethod
    def _constant(value):
        return LearnerSpec("constant", lambda params, tr, va: value)

    def test_expand_grid_order(self):
        points = expand_grid({"gamma": [1.0, 0.1], "mu": [0.01]})
        assert points == [{"gamma": 1.0, "mu": 0.01}, {"gamma": 0.1, "mu": 0.01}]
        with pytest.raises(InvalidInputError):
            expand_grid({"gamma": []})

    def test_single_point(self, labels_data):
        result = cross_validate(self._constant(0.5), labels_data, 5, {"mu": [1.0]}, seed=1)
        assert result.best_params == {"mu": 1.0}
        assert result.fold_scores.shape == (1, 5)

    def test_tie_break_prefers_regularization_then_small_gamma(self, labels_data):
        grid = {"gamma": [1.0, 0.1], "mu": [0.01, 1.0]}
        result = cross_validate(self._constant(0.5), labels_data, 4, grid, seed=1)
        assert result.best_params == {"gamma": 0.1, "mu": 1.0}

    def test_never_scores_on_training_fold(self, labels_data):
        calls = []

        def _score(params, tr, va):
            calls.append((tr.copy(), va.copy()))
            return 0.0

        result = cross_validate(LearnerSpec("audit", _score), labels_data, 5, {"k": [1, 3]}, seed=2, threads=3)
        assert len(calls) == 10
        for tr, va in calls:
            assert np.intersect1d(tr, va).size == 0
            assert len(tr) + len(va) == len(labels_data)
        for entry in result.audit:
            assert np.intersect1d(entry.train_indices, entry.val_indices).size == 0

    def test_selection_on_motif_task(self, labels_data):
        dist = default_distribution(labels_data)
        omegas = sample_omegas(dist, 64, seed=4)
        D = cross_distances(labels_data.objects, omegas.objects, "edit")
        y = labels_data.labels

        def _score(params, tr, va):
            F = features_from_distances(D, params["gamma"])
            model = train_linear(F[tr], y[tr], params["mu"], n_classes=2)
            return accuracy(predict_linear(model, F[va]), y[va])

        grid = {"gamma": [0.1, 1.0], "mu": [1e-3]}
        result = cross_validate(LearnerSpec("d2ke", _score), labels_data, 5, grid, seed=5, threads=2)
        assert result.mean_scores[result.best_index] >= result.mean_scores.max()
        assert result.best_score == pytest.approx(result.mean_scores.max())

        duplicated = cross_validate(LearnerSpec("d2ke", _score), labels_data, 5,
                                    [{"gamma": 0.1, "mu": 1e-3}, {"gamma": 0.1, "mu": 1e-3}], seed=5)
        assert np.array_equal(duplicated.fold_scores[0], duplicated.fold_scores[1])

    def test_thread_count_does_not_change_scores(self, labels_data):
        spec = LearnerSpec("sum", lambda params, tr, va: float(params["k"] + va.sum() % 7))
        a = cross_validate(spec, labels_data, 5, {"k": [1, 2, 3]}, seed=9, threads=1)
        b = cross_validate(spec, labels_data, 5, {"k": [1, 2, 3]}, seed=9, threads=8)
        assert np.array_equal(a.fold_scores, b.fold_scores)
        assert a.best_params == b.best_params

    def test_infeasible_folds(self):
        data = _strings(["a", "b", "aa", "bb", "ab", "ba", "aaa"], [0, 0, 0, 0, 0, 1, 1])
        with pytest.raises(InfeasibleSplitError):
            cross_validate(self._constant(1.0), data, 3, {"mu": [1.0]}, seed=1)


class TestModelRecords:
    """模型记录读写"""

    @pytest.fixture
    def record(self):
        return {"model": {"weights": [[1.0]]}, "gamma": 0.5, "R": 1, "seed": 3,
                "measure": "edit", "distribution": {"tag": "random-string"}}

    def test_round_trip(self, tmp_path, record):
        path = save_model_record(record, tmp_path / "model.json")
        loaded = load_model_record(path)
        assert loaded["type"] == "d2ke-model"
        for key, value in record.items():
            assert loaded[key] == value

    def test_missing_keys(self, tmp_path, record):
        del record["seed"]
        with pytest.raises(DataFormatError):
            save_model_record(record, tmp_path / "model.json")

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"type": "something-else"}', encoding="utf-8")
        with pytest.raises(DataFormatError):
            load_model_record(path)
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(DataFormatError):
            load_model_record(path)
