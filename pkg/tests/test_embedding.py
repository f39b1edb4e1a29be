"""
嵌入层测试：随机特征、半正定性、软最小、伪欧氏嵌入、收敛分析

Author: gngdingghuan
"""

import sys
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.dataset import Dataset
from core.objects import StructuredObject
from core.synthetic import gen_synthetic
from distances import cross_distances, get_measure, pairwise_distances
from embedding import (
    EmbeddingModel,
    GramConstruction,
    GramMatrix,
    dsk_cross_kernel,
    dsk_kernel,
    embed,
    embed_dataset,
    gram_from_features,
    kernel_convergence_sweep,
    pseudo_euclidean_embed,
    rf_kernel,
    softmin_distance,
)
from embedding.feature_map import features_from_distances
from sampling import (
    DataHoldout,
    OmegaSample,
    RandomString,
    RandomTimeSeries,
    default_distribution,
    sample_omegas,
)
from utils.error_handler import InvalidInputError, KindMismatchError

TASKS = ("motif-string", "shifted-sine", "two-cluster")


def _model(data, R, gamma, seed=0):
    measure = get_measure({"string": "edit", "time-series": "dtw", "vector-set": "mod-hausdorff"}[data.kind.value])
    return EmbeddingModel(sample_omegas(default_distribution(data), R, seed), gamma, measure)


class TestFeatureMap:
    """随机特征映射"""

    def test_rows_match_single_embedding(self):
        data = gen_synthetic("shifted-sine", 12, seed=1)
        model = _model(data, 32, 0.5)
        features = embed_dataset(model, data, threads=3)
        assert features.shape == (12, 32)
        for i, obj in enumerate(data.objects):
            assert np.allclose(features[i], embed(model, obj), rtol=0, atol=1e-15)

    def test_features_bounded(self):
        data = gen_synthetic("motif-string", 10, seed=1)
        features = embed_dataset(_model(data, 64, 1.0), data)
        assert np.all(features > 0)
        assert np.all(features <= 1.0 / np.sqrt(64))

    def test_zero_distance_feature(self):
        assert features_from_distances(np.zeros((1, 4)), 2.0) == pytest.approx(np.full((1, 4), 0.5))

    def test_invalid_gamma(self):
        with pytest.raises(InvalidInputError):
            features_from_distances(np.zeros((1, 4)), 0.0)

    def test_kind_mismatch(self):
        data = gen_synthetic("motif-string", 6, seed=1)
        omegas = sample_omegas(RandomTimeSeries(2, 5), 4, seed=1)
        with pytest.raises(KindMismatchError):
            EmbeddingModel(omegas, 1.0, "edit")
        model = _model(gen_synthetic("shifted-sine", 6, seed=1), 4, 1.0)
        with pytest.raises(KindMismatchError):
            embed_dataset(model, data)

    def test_rsm_equals_holdout_embedding(self):
        data = gen_synthetic("shifted-sine", 20, seed=4)
        omegas = sample_omegas(DataHoldout(data), 8, seed=6)
        model = EmbeddingModel(omegas, 0.3, "dtw")
        D = cross_distances(data.objects, omegas.objects, "dtw")
        assert np.allclose(embed_dataset(model, data), np.exp(-0.3 * D) / np.sqrt(8), rtol=0, atol=1e-15)


class TestPositiveDefinite:
    """D2KE 核构造上半正定，DSK_ND 不定"""

    def test_psd_sweep(self):
        saw_indefinite = False
        for task in TASKS:
            for seed in range(20):
                data = gen_synthetic(task, 16, seed=seed)
                model = _model(data, 48, 0.5, seed=seed)
                K = gram_from_features(embed_dataset(model, data))
                assert K.construction is GramConstruction.D2KE_RF
                assert K.psd_certified
                assert K.min_eigenvalue() >= -1e-8

                D = pairwise_distances(data.objects, model.measure)
                nd = dsk_kernel("dsk-nd", 1.0, D)
                assert not nd.psd_certified
                saw_indefinite = saw_indefinite or nd.min_eigenvalue() < -1e-3
        assert saw_indefinite

    def test_dsk_rbf_values(self):
        D = np.array([[0.0, 1.0], [1.0, 0.0]])
        K = dsk_kernel("dsk-rbf", 2.0, D)
        assert K.values[0, 1] == pytest.approx(np.exp(-2.0))
        assert np.all(np.diag(K.values) == 1.0)
        assert dsk_cross_kernel("dsk-nd", 1.0, np.array([[2.0, 3.0]])).tolist() == [[-4.0, -9.0]]

    def test_invalid_distance_matrix(self):
        with pytest.raises(InvalidInputError):
            dsk_kernel("dsk-rbf", 1.0, np.array([[0.0, 1.0], [2.0, 0.0]]))
        with pytest.raises(InvalidInputError):
            dsk_kernel("dsk-rbf", 1.0, np.array([[1.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(InvalidInputError):
            dsk_kernel("dsk-rbf", 1.0, np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_gram_rejects_asymmetric(self):
        with pytest.raises(InvalidInputError):
            GramMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]), "dsk-rbf")


class TestLipschitz:
    """编辑距离下 ‖φ̂(x₁) − φ̂(x₂)‖ ≤ γ·d(x₁, x₂)"""

    @pytest.mark.parametrize("gamma", [0.1, 1.0])
    @pytest.mark.parametrize("R", [16, 256])
    def test_feature_map_lipschitz(self, gamma, R):
        edit = get_measure("edit")
        objects = sample_omegas(RandomString(1, 8, 3), 200, seed=R).objects
        model = EmbeddingModel(sample_omegas(RandomString(1, 6, 3), R, seed=1), gamma, edit)
        features = embed_dataset(model, objects)
        rng = np.random.default_rng(int(gamma * 10) + R)
        pairs = rng.integers(0, len(objects), size=(500, 2))
        violations = 0
        for i, j in pairs:
            gap = np.linalg.norm(features[i] - features[j])
            if gap > gamma * edit.exact(objects[i], objects[j]) + 1e-12:
                violations += 1
        assert violations == 0


class TestSoftmin:
    """软最小与核的关系"""

    @pytest.mark.parametrize("task", TASKS)
    def test_kernel_softmin_identity(self, task):
        data = gen_synthetic(task, 12, seed=2)
        model = _model(data, 40, 0.2, seed=3)
        for x, y in combinations(data.objects[:8], 2):
            softmin = softmin_distance(model.omegas, model.gamma, x, y, model.measure)
            assert rf_kernel(model, x, y) == pytest.approx(np.exp(-model.gamma * softmin), abs=1e-10)

    def test_two_point_sample(self):
        # ω₁ = x 且 d(x, y) = 1；ω₂ 离两者更远
        edit = get_measure("edit")
        x = sample_omegas(RandomString(3, 3, 2), 1, seed=0).objects[0]
        symbols = list(x.value.symbols)
        symbols[0] = 1 - symbols[0]
        y = StructuredObject.string(symbols, 2)
        far = StructuredObject.string([], 2)
        omegas = OmegaSample((x, far), 0, RandomString(1, 3, 2))
        assert edit.exact(x, y) == 1
        # 两个和分别为 1 和 6
        assert softmin_distance(omegas, 100.0, x, y, edit) == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("gamma", [10.0, 100.0])
    def test_limit_bound_with_x_in_sample(self, gamma):
        # ω 包含 x 时，min_j (d(x,ω_j) + d(ω_j,y)) = d(x,y)，软最小落在 [d, d + log(R)/γ]
        edit = get_measure("edit")
        objects = sample_omegas(RandomString(1, 6, 3), 60, seed=12).objects
        base = sample_omegas(RandomString(1, 6, 3), 31, seed=13).objects
        rng = np.random.default_rng(int(gamma))
        for _ in range(100):
            i, j = rng.choice(len(objects), size=2, replace=False)
            x, y = objects[i], objects[j]
            omegas = OmegaSample(base + (x,), 0, RandomString(1, 6, 3))
            d = edit.exact(x, y)
            value = softmin_distance(omegas, gamma, x, y, edit)
            assert d - 1e-9 <= value <= d + np.log(len(omegas)) / gamma + 1e-9


class TestPseudoEuclidean:
    """伪欧氏嵌入"""

    @pytest.fixture
    def planar(self):
        points = np.random.default_rng(5).normal(size=(10, 2))
        D = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))
        return 0.5 * (D + D.T)

    def test_reconstructs_euclidean_distances(self, planar):
        emb = pseudo_euclidean_embed(planar, 2, "clip")
        coords = emb.coordinates
        rebuilt = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=-1))
        assert np.allclose(rebuilt, planar, atol=1e-8)
        assert np.all(emb.eigenvalues > 0)

    def test_columns_ordered_by_magnitude(self, planar):
        emb = pseudo_euclidean_embed(planar, 5, "keep-signed")
        magnitudes = np.abs(emb.eigenvalues)
        assert np.all(magnitudes[:-1] >= magnitudes[1:])

    def test_transform_training_rows(self, planar):
        emb = pseudo_euclidean_embed(planar, 2, "clip")
        assert np.allclose(emb.transform(planar), emb.coordinates, atol=1e-8)

    @pytest.mark.parametrize("treatment", ["clip", "flip", "keep-signed"])
    def test_indefinite_input(self, treatment):
        data = gen_synthetic("shifted-sine", 14, seed=3)
        D = pairwise_distances(data.objects, "dtw")
        emb = pseudo_euclidean_embed(D, 6, treatment)
        assert emb.rank == 6
        if treatment == "clip":
            assert np.linalg.eigvalsh(emb.gram()).min() >= -1e-8
            assert np.all(emb.coordinates[:, emb.eigenvalues <= 0] == 0.0)
        if treatment == "keep-signed":
            assert set(np.unique(emb.signature)).issubset({-1.0, 0.0, 1.0})

    def test_invalid_rank(self, planar):
        with pytest.raises(InvalidInputError):
            pseudo_euclidean_embed(planar, 11)


class TestConvergence:
    """Monte-Carlo 收敛分析"""

    @pytest.fixture
    def pairs(self):
        objects = gen_synthetic("motif-string", 6, seed=1).objects
        return list(combinations(objects, 2))

    def test_small_sweep_structure(self, pairs):
        report = kernel_convergence_sweep(RandomString(2, 8, 4), 0.1, "edit", pairs[:4],
                                          [4, 16], seed=3, trials=3, reference_multiplier=4)
        assert report.reference_R == 64
        assert set(report.errors) == {4, 16}
        assert all(len(v) == 3 for v in report.errors.values())
        assert all(e >= 0 for v in report.errors.values() for e in v)
        assert len(report.ratios()) == 1
        assert report.to_dict()["measure"] == "edit"

    def test_deterministic(self, pairs):
        a = kernel_convergence_sweep(RandomString(2, 8, 4), 0.1, "edit", pairs[:3], [4, 8], 5, 3, 4)
        b = kernel_convergence_sweep(RandomString(2, 8, 4), 0.1, "edit", pairs[:3], [4, 8], 5, 3, 4)
        assert a.errors == b.errors

    def test_point_mass_has_zero_error(self):
        # ω 恒等于 x，且 d(x, ω) = d(y, ω) = 0：近似核与参考核完全相同
        x = StructuredObject.time_series([1.0, 2.0])
        y = StructuredObject.time_series([1.0, 2.0])
        dist = DataHoldout(Dataset((x,), np.array([0])), without_replacement=False)
        report = kernel_convergence_sweep(dist, 1.0, "dtw", [(x, y), (x, x)], [4, 16, 64], seed=1, trials=3)
        assert report.reference_R == 4096
        assert all(e == 0.0 for errs in report.errors.values() for e in errs)

    def test_invalid_arguments(self, pairs):
        dist = RandomString(2, 8, 4)
        with pytest.raises(InvalidInputError):
            kernel_convergence_sweep(dist, 0.1, "edit", pairs, [16, 4], seed=1, trials=3)
        with pytest.raises(InvalidInputError):
            kernel_convergence_sweep(dist, 0.1, "edit", pairs, [4, 16], seed=1, trials=2)
        with pytest.raises(InvalidInputError):
            kernel_convergence_sweep(dist, 0.1, "edit", [], [4, 16], seed=1, trials=3)

    @pytest.mark.slow
    def test_error_shrinks_like_inverse_sqrt(self):
        objects = gen_synthetic("motif-string", 8, seed=2).objects
        pairs = list(combinations(objects, 2))
        dist = default_distribution(gen_synthetic("motif-string", 8, seed=2))
        report = kernel_convergence_sweep(dist, 0.1, "edit", pairs, [16, 64, 256, 1024], seed=7, trials=5)
        for ratio in report.ratios():
            assert 1.2 <= ratio <= 3.5
