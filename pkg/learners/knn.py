"""
k 近邻分类
距离相同按训练下标优先，票数相同取最小类别下标

Author: gngdingghuan
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from core.dataset import Dataset
from core.objects import StructuredObject
from distances.measures import BaseMeasure, ObjectBatch, get_measure
from utils.error_handler import DimensionMismatchError, EmptyDatasetError, InvalidInputError, KindMismatchError


@dataclass(frozen=True, eq=False)
class KnnModel:
    """训练集 + k + 距离度量"""
    train: Dataset
    k: int
    measure: BaseMeasure

    def __post_init__(self):
        object.__setattr__(self, "measure", get_measure(self.measure))
        if len(self.train) == 0:
            raise EmptyDatasetError("kNN 需要非空训练集")
        if not 1 <= self.k <= len(self.train):
            raise InvalidInputError(f"k 必须满足 1 ≤ k ≤ n_train={len(self.train)}，实际 {self.k}")
        if self.train.kind is not self.measure.kind:
            raise KindMismatchError(f"训练集类型 {self.train.kind.value} 与度量 {self.measure.name} 不符")

    @cached_property
    def batch(self) -> ObjectBatch:
        return self.measure.prepare(self.train.objects)


def vote_from_distances(distances: np.ndarray, labels: np.ndarray, k: int, n_classes: int) -> np.ndarray:
    """
    由 m × n_train 距离矩阵批量投票
    """
    distances = np.atleast_2d(np.asarray(distances, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.int64)
    if distances.shape[1] != len(labels):
        raise DimensionMismatchError(f"距离矩阵需要 {len(labels)} 列，实际 {distances.shape[1]}")
    if not 1 <= k <= len(labels):
        raise InvalidInputError(f"k 必须满足 1 ≤ k ≤ {len(labels)}，实际 {k}")
    nearest = np.argsort(distances, axis=1, kind="stable")[:, :k]
    votes = np.zeros((distances.shape[0], n_classes), dtype=np.int64)
    np.add.at(votes, (np.arange(distances.shape[0])[:, None], labels[nearest]), 1)
    return np.argmax(votes, axis=1).astype(np.int64)


def knn_predict(model: KnnModel, x: StructuredObject) -> int:
    """单个对象的预测类别"""
    if x.kind is not model.measure.kind:
        raise KindMismatchError(f"对象类型 {x.kind.value} 与模型类型 {model.measure.kind.value} 不符")
    distances = model.measure.one_to_many(x, model.batch)
    return int(vote_from_distances(distances[None, :], model.train.labels, model.k, model.train.n_classes)[0])


def knn_predict_many(model: KnnModel, objects: Sequence[StructuredObject]) -> np.ndarray:
    return np.array([knn_predict(model, x) for x in objects], dtype=np.int64)
