"""
D2KE 随机特征映射

    φ̂_j(x) = exp(-γ d(x, ω_j)) / √R,   j = 1..R
    k̃_R(x, y) = φ̂(x)·φ̂(y)
    softmin(x, y) = -(1/γ) log( (1/R) Σ_j exp(-γ (d(x, ω_j) + d(ω_j, y))) )

且 k̃_R(x, y) = exp(-γ softmin(x, y))。

Author: gngdingghuan
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from core.dataset import Dataset
from core.objects import StructuredObject
from distances.matrix import cross_distances
from distances.measures import BaseMeasure, ObjectBatch, get_measure
from sampling.sampler import OmegaSample
from utils.error_handler import InvalidInputError, KindMismatchError
from utils.logger import log


def features_from_distances(distances: np.ndarray, gamma: float) -> np.ndarray:
    """由 n×R 距离矩阵得到 n×R 特征矩阵"""
    if not gamma > 0:
        raise InvalidInputError(f"gamma 必须为正，实际 {gamma}")
    distances = np.asarray(distances, dtype=np.float64)
    R = distances.shape[-1]
    if R == 0:
        return np.zeros_like(distances)
    return np.exp(-gamma * distances) / np.sqrt(R)


@dataclass(frozen=True, eq=False)
class EmbeddingModel:
    """冻结的 R 个 ω 与 γ：把对象映射到 R 维特征"""
    omegas: OmegaSample
    gamma: float
    measure: BaseMeasure

    def __post_init__(self):
        object.__setattr__(self, "measure", get_measure(self.measure))
        if not self.gamma > 0:
            raise InvalidInputError(f"gamma 必须为正，实际 {self.gamma}")
        if self.omegas.kind is not self.measure.kind:
            raise KindMismatchError(
                f"ω 类型 {self.omegas.kind.value} 与度量 {self.measure.name} 的类型 {self.measure.kind.value} 不符"
            )

    @property
    def R(self) -> int:
        return len(self.omegas)

    @cached_property
    def batch(self) -> ObjectBatch:
        """预分组的 ω"""
        return self.measure.prepare(self.omegas.objects)

    def distances(self, x: StructuredObject) -> np.ndarray:
        """x 到每个 ω 的距离"""
        if x.kind is not self.measure.kind:
            raise KindMismatchError(f"对象类型 {x.kind.value} 与模型类型 {self.measure.kind.value} 不符")
        return self.measure.one_to_many(x, self.batch)

    def describe(self) -> dict:
        return {"gamma": self.gamma, "measure": self.measure.name, **self.omegas.describe()}


def embed(model: EmbeddingModel, x: StructuredObject) -> np.ndarray:
    """单个对象的 R 维特征"""
    return features_from_distances(model.distances(x)[None, :], model.gamma)[0]


def embed_dataset(
    model: EmbeddingModel,
    data: Union[Dataset, Sequence[StructuredObject]],
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    批量嵌入：第 i 行等于 embed(model, x_i)，与并行调度无关
    """
    objects = list(data.objects if isinstance(data, Dataset) else data)
    for i, obj in enumerate(objects):
        if obj.kind is not model.measure.kind:
            raise KindMismatchError(
                f"样本 {i}: 类型 {obj.kind.value} 与模型类型 {model.measure.kind.value} 不符"
            )
    if not objects:
        return np.zeros((0, model.R), dtype=np.float64)
    distances = cross_distances(objects, model.omegas.objects, model.measure, threads)
    log.debug(f"嵌入完成: n={len(objects)}, R={model.R}, γ={model.gamma}")
    return features_from_distances(distances, model.gamma)


def rf_kernel(model: EmbeddingModel, x: StructuredObject, y: StructuredObject) -> float:
    """随机特征核 k̃_R(x, y)"""
    return float(np.dot(embed(model, x), embed(model, y)))


def softmin_distance(
    omegas: OmegaSample,
    gamma: float,
    x: StructuredObject,
    y: StructuredObject,
    measure,
) -> float:
    """
    经验软最小：-(1/γ)·log((1/R)·Σ exp(-γ (d(x,ω_j) + d(ω_j,y))))，用 log-sum-exp 计算
    """
    if not gamma > 0:
        raise InvalidInputError(f"gamma 必须为正，实际 {gamma}")
    model = EmbeddingModel(omegas, gamma, measure)
    sums = model.distances(x) + model.distances(y)
    return float(-(logsumexp(-gamma * sums) - np.log(len(sums))) / gamma)
