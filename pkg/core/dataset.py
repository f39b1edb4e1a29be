"""
带标签的数据集，以及分层划分 / 分层 K 折 / 时间序列标准化

Author: gngdingghuan
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.objects import ObjectKind, StructuredObject, TimeSeries
from utils.error_handler import (
    DimensionMismatchError,
    EmptyDatasetError,
    InfeasibleSplitError,
    InvalidInputError,
    KindMismatchError,
)
from utils.logger import log


SPLIT_TAGS = ("full", "train", "test")


@dataclass(frozen=True)
class Dataset:
    """
    同类结构化对象 + 类别标签

    labels 为 0 起始的连续类别下标；子集（交叉验证折）沿用父数据集的 n_classes。
    """
    objects: Tuple[StructuredObject, ...]
    labels: np.ndarray
    split_tag: str = "full"
    metadata: Dict[str, Any] = field(default_factory=dict)
    n_classes: Optional[int] = None

    def __post_init__(self):
        objects = tuple(self.objects)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1).copy()
        labels.setflags(write=False)
        if len(objects) != len(labels):
            raise InvalidInputError(f"对象数 {len(objects)} 与标签数 {len(labels)} 不一致")
        if self.split_tag not in SPLIT_TAGS:
            raise InvalidInputError(f"未知的 split_tag: {self.split_tag}")
        if objects:
            kind = objects[0].kind
            for i, obj in enumerate(objects):
                if obj.kind is not kind:
                    raise KindMismatchError(f"样本 {i} 类型 {obj.kind.value} 与 {kind.value} 不一致")
            if kind is ObjectKind.TIME_SERIES:
                n_vars = {obj.value.n_vars for obj in objects}
                if len(n_vars) > 1:
                    raise DimensionMismatchError(f"时间序列变量数不一致: {sorted(n_vars)}")
            elif kind is ObjectKind.VECTOR_SET:
                dims = {obj.value.dim for obj in objects}
                if len(dims) > 1:
                    raise DimensionMismatchError(f"向量维度不一致: {sorted(dims)}")
            elif kind is ObjectKind.STRING:
                sizes = {obj.value.alphabet_size for obj in objects}
                if len(sizes) > 1:
                    raise DimensionMismatchError(f"字母表大小不一致: {sorted(sizes)}")
        if len(labels) and labels.min() < 0:
            raise InvalidInputError("标签必须为非负整数")

        n_classes = self.n_classes
        if n_classes is None:
            n_classes = int(labels.max()) + 1 if len(labels) else 0
            present = set(labels.tolist())
            if present != set(range(n_classes)):
                raise InvalidInputError(f"类别下标必须是从 0 开始的连续区间，实际为 {sorted(present)}")
        elif len(labels) and labels.max() >= n_classes:
            raise InvalidInputError(f"标签 {labels.max()} 超出 n_classes={n_classes}")

        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", int(n_classes))

    def __len__(self) -> int:
        return len(self.objects)

    @property
    def kind(self) -> Optional[ObjectKind]:
        return self.objects[0].kind if self.objects else None

    def subset(self, indices: Sequence[int], split_tag: Optional[str] = None) -> "Dataset":
        """按下标取子集，保留 n_classes 与元数据"""
        indices = [int(i) for i in indices]
        return Dataset(
            objects=tuple(self.objects[i] for i in indices),
            labels=self.labels[indices] if indices else np.zeros(0, dtype=np.int64),
            split_tag=split_tag or self.split_tag,
            metadata=dict(self.metadata),
            n_classes=self.n_classes,
        )

    def with_metadata(self, **updates) -> "Dataset":
        metadata = dict(self.metadata)
        metadata.update(updates)
        return replace(self, metadata=metadata)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            len(self) == len(other)
            and np.array_equal(self.labels, other.labels)
            and all(a == b for a, b in zip(self.objects, other.objects))
        )

    __hash__ = None  # type: ignore[assignment]


def _stratified_order(labels: np.ndarray, seed: int) -> List[np.ndarray]:
    """每个类别内部按种子打乱后的下标"""
    rng = np.random.default_rng(seed)
    groups = []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        groups.append(idx[rng.permutation(len(idx))])
    return groups


def _allocate_train_quota(sizes: List[int], fraction: float, total: int) -> List[int]:
    """最大余数法分配各类别的训练样本数，总数恰为 total"""
    exact = [fraction * s for s in sizes]
    quotas = [int(np.floor(e)) for e in exact]
    lower = [1 if s >= 2 else 0 for s in sizes]
    upper = [s - 1 if s >= 2 else s for s in sizes]
    quotas = [min(max(q, lo), hi) for q, lo, hi in zip(quotas, lower, upper)]
    remainders = [e - q for e, q in zip(exact, quotas)]

    remaining = total - sum(quotas)
    order = sorted(range(len(sizes)), key=lambda c: (-remainders[c], c))
    while remaining > 0 and any(quotas[c] < upper[c] for c in order):
        for c in order:
            if remaining > 0 and quotas[c] < upper[c]:
                quotas[c] += 1
                remaining -= 1
    while remaining < 0 and any(quotas[c] > lower[c] for c in order):
        for c in reversed(order):
            if remaining < 0 and quotas[c] > lower[c]:
                quotas[c] -= 1
                remaining += 1
    return quotas


def split_dataset(data: Dataset, train_fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """
    分层随机划分为训练/测试集

    每个类别取 round(fraction * n_c) 个进入训练集（至少 1 个、至多 n_c - 1 个，
    当该类别样本数 ≥ 2 时），整体结果由 seed 完全决定。
    """
    if len(data) == 0:
        raise EmptyDatasetError("无法划分空数据集")
    if not 0.0 < train_fraction < 1.0:
        raise InvalidInputError(f"train_fraction 必须在 (0, 1) 内，实际 {train_fraction}")

    n = len(data)
    n_train_total = int(round(train_fraction * n))
    if n_train_total < 1 or n_train_total > n - 1:
        raise InfeasibleSplitError(
            f"train_fraction={train_fraction} 在 {n} 个样本上会产生空的训练集或测试集"
        )

    groups = _stratified_order(data.labels, seed)
    quotas = _allocate_train_quota([len(g) for g in groups], train_fraction, n_train_total)

    train_idx: List[int] = []
    test_idx: List[int] = []
    for group, k in zip(groups, quotas):
        train_idx.extend(group[:k].tolist())
        test_idx.extend(group[k:].tolist())

    if not train_idx or not test_idx:
        raise InfeasibleSplitError(f"train_fraction={train_fraction} 产生了空划分")

    train_idx.sort()
    test_idx.sort()
    log.debug(f"分层划分: {len(train_idx)} 训练 / {len(test_idx)} 测试 (seed={seed})")
    metadata = {"split_seed": seed, "train_fraction": train_fraction, "stratified": True}
    train = data.subset(train_idx, "train").with_metadata(**metadata, split_indices=train_idx)
    test = data.subset(test_idx, "test").with_metadata(**metadata, split_indices=test_idx)
    return train, test


def stratified_folds(labels: np.ndarray, folds: int, seed: int) -> List[np.ndarray]:
    """
    分层 K 折：返回每折的验证集下标（升序）

    每个类别的样本数必须 ≥ folds，保证每折包含每个类别。
    """
    labels = np.asarray(labels)
    if folds < 2:
        raise InvalidInputError(f"folds 必须 ≥ 2，实际 {folds}")
    counts = np.bincount(labels) if len(labels) else np.zeros(0, dtype=np.int64)
    present = counts[counts > 0]
    if len(present) < 2:
        raise InfeasibleSplitError("交叉验证需要至少两个类别")
    if present.min() < folds:
        raise InfeasibleSplitError(
            f"类别最少样本数 {int(present.min())} < folds={folds}，无法保证每折包含每个类别"
        )

    buckets: List[List[int]] = [[] for _ in range(folds)]
    offset = 0
    for group in _stratified_order(labels, seed):
        for j, index in enumerate(group.tolist()):
            buckets[(offset + j) % folds].append(index)
        offset += len(group)
    return [np.array(sorted(b), dtype=np.int64) for b in buckets]


def standardize_time_series(train: Dataset, *others: Dataset) -> Tuple[Dataset, List[Dataset], Dict[str, List[float]]]:
    """
    用训练集的逐变量均值/标准差标准化时间序列（只作用于数据，不作用于 ω）
    """
    if train.kind is not ObjectKind.TIME_SERIES:
        raise KindMismatchError("standardize_time_series 只适用于时间序列数据集")
    stacked = np.vstack([obj.value.values for obj in train.objects])
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    std = np.where(std > 0, std, 1.0)

    def _apply(data: Dataset) -> Dataset:
        objects = tuple(StructuredObject(TimeSeries((obj.value.values - mean) / std)) for obj in data.objects)
        return Dataset(objects, data.labels, data.split_tag, dict(data.metadata, standardized=True), data.n_classes)

    stats = {"mean": mean.tolist(), "std": std.tolist()}
    return _apply(train), [_apply(d) for d in others], stats
