"""
D2KE 核心对象层单元测试

Author: gngdingghuan
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.dataset import Dataset, split_dataset, standardize_time_series, stratified_folds
from core.formats import dataset_alphabet, load_dataset, read_matrix, write_dataset, write_matrix
from core.objects import ObjectKind, StructuredObject, SymbolString
from core.synthetic import SyntheticTask, gen_synthetic
from utils.error_handler import (
    DataFormatError,
    DimensionMismatchError,
    InfeasibleSplitError,
    InvalidInputError,
    KindMismatchError,
)


def _strings(texts, alphabet="ab"):
    return tuple(StructuredObject(SymbolString.from_text(t, alphabet)) for t in texts)


class TestStructuredObject:
    """结构化对象测试"""

    def test_kind_is_fixed(self):
        obj = StructuredObject.time_series([1.0, 2.0, 3.0])
        assert obj.kind is ObjectKind.TIME_SERIES
        assert obj.value.length == 3
        assert obj.value.n_vars == 1
        with pytest.raises(KindMismatchError):
            obj.expect(ObjectKind.STRING)

    def test_values_are_read_only(self):
        obj = StructuredObject.vector_set([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            obj.value.elements[0, 0] = 5.0

    def test_empty_string_allowed(self):
        obj = StructuredObject(SymbolString.from_text("", "ab"))
        assert len(obj.value) == 0

    def test_symbol_outside_alphabet(self):
        with pytest.raises(InvalidInputError):
            SymbolString.from_text("abc", "ab")

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            StructuredObject.time_series([1.0, float("nan")])

    def test_fingerprint_depends_on_content(self):
        a = StructuredObject.string([0, 1], 2)
        b = StructuredObject.string([0, 1], 2)
        c = StructuredObject.string([1, 0], 2)
        assert a.fingerprint() == b.fingerprint()
        assert a.fingerprint() != c.fingerprint()


class TestDataset:
    """数据集与划分测试"""

    @pytest.fixture
    def ten(self):
        objects = tuple(StructuredObject.time_series(np.arange(i + 1, dtype=float)) for i in range(10))
        labels = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1, 1])
        return Dataset(objects, labels)

    def test_split_sizes(self, ten):
        train, test = split_dataset(ten, 0.7, seed=1)
        assert len(train) == 7
        assert len(test) == 3
        assert train.split_tag == "train"
        assert set(train.metadata["split_indices"]).isdisjoint(test.metadata["split_indices"])

    def test_split_is_stratified(self, ten):
        train, test = split_dataset(ten, 0.7, seed=3)
        assert set(train.labels.tolist()) == {0, 1}
        assert set(test.labels.tolist()) == {0, 1}

    def test_split_deterministic(self, ten):
        a, _ = split_dataset(ten, 0.7, seed=5)
        b, _ = split_dataset(ten, 0.7, seed=5)
        assert a.metadata["split_indices"] == b.metadata["split_indices"]

    def test_split_infeasible(self, ten):
        with pytest.raises(InfeasibleSplitError):
            split_dataset(ten.subset([0, 5]), 0.9, seed=1)

    def test_mixed_kinds_rejected(self):
        objects = (StructuredObject.time_series([1.0]), StructuredObject.string([0], 2))
        with pytest.raises(KindMismatchError):
            Dataset(objects, np.array([0, 1]))

    def test_mixed_dimensions_rejected(self):
        objects = (StructuredObject.vector_set([[0.0, 1.0]]), StructuredObject.vector_set([[0.0, 1.0, 2.0]]))
        with pytest.raises(DimensionMismatchError):
            Dataset(objects, np.array([0, 1]))

    def test_stratified_folds_cover_all(self, ten):
        folds = stratified_folds(ten.labels, 3, seed=2)
        joined = np.sort(np.concatenate(folds))
        assert np.array_equal(joined, np.arange(10))
        for fold in folds:
            assert set(ten.labels[fold].tolist()) == {0, 1}

    def test_stratified_folds_infeasible(self, ten):
        with pytest.raises(InfeasibleSplitError):
            stratified_folds(ten.labels, 6, seed=2)

    def test_standardize_uses_train_statistics(self, ten):
        train, test = split_dataset(ten, 0.7, seed=1)
        train_std, (test_std,), stats = standardize_time_series(train, test)
        stacked = np.vstack([o.value.values for o in train_std.objects])
        assert np.allclose(stacked.mean(axis=0), 0.0)
        assert np.allclose(stacked.std(axis=0), 1.0)
        first = test.objects[0].value.values
        expected = (first - np.array(stats["mean"])) / np.array(stats["std"])
        assert np.allclose(test_std.objects[0].value.values, expected)


class TestFormats:
    """文件格式测试"""

    def test_string_round_trip(self, tmp_path):
        data = Dataset(_strings(["ab", "ba", "", "bbb"]), np.array([0, 1, 0, 1]), metadata={"alphabet": "ab"})
        path = write_dataset(data, tmp_path / "d.str.txt")
        loaded = load_dataset(path)
        assert loaded == data
        assert dataset_alphabet(loaded) == "ab"
        assert loaded.metadata["checksum"]

    def test_time_series_round_trip(self, tmp_path):
        data = gen_synthetic(SyntheticTask.SHIFTED_SINE, 6, seed=4)
        loaded = load_dataset(write_dataset(data, tmp_path / "d.ts.tsv"))
        assert loaded == data

    def test_vector_set_round_trip(self, tmp_path):
        data = gen_synthetic("two-cluster", 6, seed=4)
        loaded = load_dataset(write_dataset(data, tmp_path / "d.vset.jsonl"))
        assert loaded == data

    def test_bad_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.ts.tsv"
        path.write_text("0 2 1 1.0 2.0\n1 3 1 1.0\n", encoding="utf-8")
        with pytest.raises(DataFormatError) as info:
            load_dataset(path)
        assert info.value.line_number == 2

    def test_inconsistent_dimension(self, tmp_path):
        path = tmp_path / "bad.vset.jsonl"
        path.write_text('{"label": 0, "elements": [[0, 1]]}\n{"label": 1, "elements": [[0, 1, 2]]}\n',
                        encoding="utf-8")
        with pytest.raises(DimensionMismatchError):
            load_dataset(path)

    def test_labels_remapped(self, tmp_path):
        path = tmp_path / "labels.ts.tsv"
        path.write_text("7 1 1 0.0\n3 1 1 1.0\n7 1 1 2.0\n", encoding="utf-8")
        data = load_dataset(path)
        assert data.labels.tolist() == [1, 0, 1]
        assert data.metadata["label_mapping"] == {"3": 0, "7": 1}

    def test_matrix_round_trip(self, tmp_path):
        matrix = np.random.default_rng(0).normal(size=(3, 4))
        assert np.array_equal(read_matrix(write_matrix(matrix, tmp_path / "m.txt")), matrix)


class TestSynthetic:
    """合成任务测试"""

    @pytest.mark.parametrize("task", [t.value for t in SyntheticTask])
    def test_balanced_and_deterministic(self, task):
        a = gen_synthetic(task, 21, seed=9)
        b = gen_synthetic(task, 21, seed=9)
        assert a == b
        counts = np.bincount(a.labels)
        assert abs(int(counts[0]) - int(counts[1])) <= 1

    def test_motif_string_classes(self):
        data = gen_synthetic("motif-string", 40, seed=2)
        alphabet = data.metadata["alphabet"]
        for obj, label in zip(data.objects, data.labels):
            assert ("dbd" in obj.value.to_text(alphabet)) == bool(label)

    def test_unknown_task(self):
        with pytest.raises(InvalidInputError):
            gen_synthetic("spirals", 10, seed=1)
