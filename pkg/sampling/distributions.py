"""
p(ω) 分布规格
- RandomTimeSeries: 长度均匀、元素高斯
- RandomString:     长度均匀、符号在字母表上均匀
- RandomVectorSet:  大小均匀、元素在单位球面上均匀
- DataHoldout:      从训练集中均匀抽取（代表集方法）

Author: gngdingghuan
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Union

import numpy as np

from config import get_config
from core.dataset import Dataset
from core.objects import ObjectKind
from utils.error_handler import EmptyDatasetError, InvalidInputError


def _check_range(name: str, low: int, high: int) -> None:
    if not (1 <= low <= high):
        raise InvalidInputError(f"{name} 范围需满足 1 ≤ min ≤ max，实际 [{low}, {high}]")


@dataclass(frozen=True)
class RandomTimeSeries:
    """随机时间序列"""
    length_min: int
    length_max: int
    n_vars: int = 1
    element_std: float = 1.0

    tag = "random-time-series"
    kind = ObjectKind.TIME_SERIES

    def __post_init__(self):
        _check_range("length", self.length_min, self.length_max)
        if self.n_vars < 1:
            raise InvalidInputError(f"n_vars 必须 ≥ 1，实际 {self.n_vars}")
        if not self.element_std > 0:
            raise InvalidInputError(f"element_std 必须为正，实际 {self.element_std}")

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "length_min": self.length_min, "length_max": self.length_max,
                "n_vars": self.n_vars, "element_std": self.element_std}


@dataclass(frozen=True)
class RandomString:
    """随机符号串"""
    length_min: int
    length_max: int
    alphabet_size: int

    tag = "random-string"
    kind = ObjectKind.STRING

    def __post_init__(self):
        _check_range("length", self.length_min, self.length_max)
        if self.alphabet_size < 1:
            raise InvalidInputError(f"alphabet_size 必须 ≥ 1，实际 {self.alphabet_size}")

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "length_min": self.length_min, "length_max": self.length_max,
                "alphabet_size": self.alphabet_size}


@dataclass(frozen=True)
class RandomVectorSet:
    """随机向量集合"""
    size_min: int
    size_max: int
    dim: int

    tag = "random-vector-set"
    kind = ObjectKind.VECTOR_SET

    def __post_init__(self):
        _check_range("size", self.size_min, self.size_max)
        if self.dim < 1:
            raise InvalidInputError(f"dim 必须 ≥ 1，实际 {self.dim}")

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "size_min": self.size_min, "size_max": self.size_max, "dim": self.dim}


@dataclass(frozen=True, eq=False)
class DataHoldout:
    """
    从数据集中抽取 ω（p(ω) = p(x)）

    source 为 None 只出现在从文件恢复的记录中，此时不能再抽样。
    """
    source: Optional[Dataset]
    without_replacement: bool = True
    source_info: Dict[str, Any] = field(default_factory=dict)

    tag = "data-holdout"

    def __post_init__(self):
        if self.source is not None:
            if len(self.source) == 0:
                raise EmptyDatasetError("DataHoldout 的来源数据集为空")
            if not self.source_info:
                info = {
                    "size": len(self.source),
                    "split_tag": self.source.split_tag,
                    "checksum": self.source.metadata.get("checksum"),
                    "source_path": self.source.metadata.get("source_path"),
                    "split_indices": self.source.metadata.get("split_indices"),
                }
                object.__setattr__(self, "source_info", info)

    @property
    def kind(self) -> ObjectKind:
        if self.source is not None:
            return self.source.kind
        return ObjectKind(self.source_info["kind"])

    def to_dict(self) -> Dict[str, Any]:
        info = dict(self.source_info)
        info["kind"] = self.kind.value
        return {"tag": self.tag, "without_replacement": self.without_replacement, "source": info}


OmegaDistribution = Union[RandomTimeSeries, RandomString, RandomVectorSet, DataHoldout]


def distribution_from_dict(record: Dict[str, Any], source: Optional[Dataset] = None) -> OmegaDistribution:
    """从 to_dict 的结果恢复分布规格"""
    tag = record.get("tag")
    if tag == RandomTimeSeries.tag:
        return RandomTimeSeries(int(record["length_min"]), int(record["length_max"]),
                                int(record["n_vars"]), float(record["element_std"]))
    if tag == RandomString.tag:
        return RandomString(int(record["length_min"]), int(record["length_max"]), int(record["alphabet_size"]))
    if tag == RandomVectorSet.tag:
        return RandomVectorSet(int(record["size_min"]), int(record["size_max"]), int(record["dim"]))
    if tag == DataHoldout.tag:
        return DataHoldout(source, bool(record.get("without_replacement", True)), dict(record.get("source", {})))
    raise InvalidInputError(f"未知的分布标签: {tag!r}")


def default_distribution(train: Dataset, length_max: Optional[int] = None,
                         element_std: Optional[float] = None) -> OmegaDistribution:
    """
    按训练数据的类型给出默认的随机对象分布

    Args:
        train: 训练集（提供 V / p / 字母表 / 长度中位数）
        length_max: 覆盖随机对象长度（或集合大小）上界
        element_std: 覆盖随机时间序列元素的标准差
    """
    sampling = get_config().sampling
    kind = train.kind
    if kind is ObjectKind.TIME_SERIES:
        low, high = sampling.ts_length
        high = length_max or high
        return RandomTimeSeries(min(low, high), high, train.objects[0].value.n_vars,
                                element_std if element_std is not None else sampling.element_std)
    if kind is ObjectKind.STRING:
        low = sampling.string_length_min
        median = int(np.median([len(obj.value) for obj in train.objects]))
        high = length_max or max(low, median)
        return RandomString(min(low, high), high, train.objects[0].value.alphabet_size)
    if kind is ObjectKind.VECTOR_SET:
        low, high = sampling.vset_size
        high = length_max or high
        return RandomVectorSet(min(low, high), high, train.objects[0].value.dim)
    raise InvalidInputError("空数据集无法推断默认分布")


def with_length_max(dist: OmegaDistribution, length_max: int) -> OmegaDistribution:
    """替换长度/大小上界（下界随之收缩）"""
    if isinstance(dist, (RandomTimeSeries, RandomString)):
        return replace(dist, length_min=min(dist.length_min, length_max), length_max=length_max)
    if isinstance(dist, RandomVectorSet):
        return replace(dist, size_min=min(dist.size_min, length_max), size_max=length_max)
    return dist
