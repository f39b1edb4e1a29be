"""
D2KE 距离度量
DTW / Levenshtein 编辑距离 / 修正 Hausdorff 距离

每个度量都提供单对求值 evaluate(x, y) 与一对多求值 one_to_many(x, batch)。
一对多时把形状相同的对象堆叠成一组，动态规划的每一行用前缀最小值改写成
整组的向量运算：

    D[j] = c[j] + min(a[j], D[j-1])   =>   D = S + cummin(a - S_prev)

其中 S 为 c 的前缀和，S_prev = S - c。编辑距离的插入代价为常数 1，同理
D[j] = j + cummin(t[j] - j)，整数运算无舍入误差。

Author: gngdingghuan
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.objects import ObjectKind, StructuredObject, SymbolString, TimeSeries, VectorSet
from utils.error_handler import DimensionMismatchError, InvalidInputError, KindMismatchError


@dataclass(frozen=True)
class MetricAxioms:
    """度量公理：(i) 非负 (ii) 同一性 (iii) 对称 (iv) 三角不等式"""
    non_negativity: bool
    identity: bool
    symmetry: bool
    triangle: bool

    def to_dict(self) -> Dict[str, bool]:
        return {
            "non_negativity": self.non_negativity,
            "identity": self.identity,
            "symmetry": self.symmetry,
            "triangle": self.triangle,
        }


# ---------------------------------------------------------------------------
# 批量动态规划内核
# ---------------------------------------------------------------------------

def dtw_batch(x: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """
    x (T×V) 到 m 条等长序列 stack (m×L×V) 的 DTW 距离，局部代价为行间欧氏距离
    """
    T = x.shape[0]
    m, L, _ = stack.shape
    # cost[i] 形状 m×L
    cost = np.sqrt(np.sum((x[:, None, None, :] - stack[None, :, :, :]) ** 2, axis=-1))

    prev = np.full((m, L + 1), np.inf)
    prev[:, 0] = 0.0
    cur = np.empty((m, L + 1))
    for i in range(T):
        c = cost[i]
        a = np.minimum(prev[:, :-1], prev[:, 1:])
        s = np.cumsum(c, axis=1)
        cur[:, 0] = np.inf
        cur[:, 1:] = s + np.minimum.accumulate(a - (s - c), axis=1)
        prev, cur = cur, prev
    return np.maximum(prev[:, L], 0.0)


def edit_batch(x: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """
    符号串 x (长度 n) 到 m 个等长串 stack (m×L) 的 Levenshtein 距离（单位代价）
    """
    n = x.shape[0]
    m, L = stack.shape
    if L == 0:
        return np.full(m, n, dtype=np.int64)
    if n == 0:
        return np.full(m, L, dtype=np.int64)

    cols = np.arange(L + 1, dtype=np.int64)
    prev = np.broadcast_to(cols, (m, L + 1)).copy()
    for i in range(1, n + 1):
        mismatch = (stack != x[i - 1]).astype(np.int64)
        t = np.empty((m, L + 1), dtype=np.int64)
        t[:, 0] = i
        t[:, 1:] = np.minimum(prev[:, 1:] + 1, prev[:, :-1] + mismatch)
        prev = cols + np.minimum.accumulate(t - cols, axis=1)
    return prev[:, L]


def mod_hausdorff_batch(x: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """
    集合 x (n×p) 到 m 个等大小集合 stack (m×s×p) 的修正 Hausdorff 距离
    """
    dist = np.sqrt(np.sum((x[None, :, None, :] - stack[:, None, :, :]) ** 2, axis=-1))  # m×n×s
    forward = dist.min(axis=2).mean(axis=1)
    backward = dist.min(axis=1).mean(axis=1)
    return np.maximum(forward, backward)


# ---------------------------------------------------------------------------
# 预分组的对象批
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ObjectBatch:
    """按形状分组、堆叠好的对象集合（可复用于多次一对多求值）"""
    kind: ObjectKind
    size: int
    groups: Tuple[Tuple[np.ndarray, np.ndarray], ...]  # (原始下标, 堆叠数组)
    feature_dim: int  # V / p / alphabet_size


def _raw(obj: StructuredObject) -> np.ndarray:
    value = obj.value
    if isinstance(value, TimeSeries):
        return value.values
    if isinstance(value, SymbolString):
        return np.asarray(value.symbols, dtype=np.int64)
    return value.elements


def _feature_dim(obj: StructuredObject) -> int:
    value = obj.value
    if isinstance(value, TimeSeries):
        return value.n_vars
    if isinstance(value, SymbolString):
        return value.alphabet_size
    return value.dim


class BaseMeasure(ABC):
    """
    距离度量基类
    子类定义 name / kind / axioms 以及批量内核
    """

    name: str = "base"
    kind: ObjectKind = ObjectKind.TIME_SERIES
    axioms: MetricAxioms = MetricAxioms(True, True, True, False)

    @abstractmethod
    def _batch(self, x: np.ndarray, stack: np.ndarray) -> np.ndarray:
        """x 到一组等形状对象的距离"""
        pass

    def _check_pair(self, a: StructuredObject, b: StructuredObject) -> None:
        a.expect(self.kind)
        b.expect(self.kind)
        da, db = _feature_dim(a), _feature_dim(b)
        if da != db:
            raise DimensionMismatchError(f"{self.name}: 维度不一致 ({da} vs {db})")

    def prepare(self, objects: Sequence[StructuredObject]) -> ObjectBatch:
        """把对象按形状分组堆叠"""
        buckets: Dict[Tuple[int, ...], List[int]] = {}
        dims = set()
        for i, obj in enumerate(objects):
            obj.expect(self.kind)
            dims.add(_feature_dim(obj))
            buckets.setdefault(_raw(obj).shape, []).append(i)
        if len(dims) > 1:
            raise DimensionMismatchError(f"{self.name}: 批内维度不一致 {sorted(dims)}")
        groups = []
        for shape in sorted(buckets):
            index = np.asarray(buckets[shape], dtype=np.int64)
            stack = np.stack([_raw(objects[i]) for i in index])
            groups.append((index, stack))
        return ObjectBatch(self.kind, len(objects), tuple(groups), dims.pop() if dims else 0)

    def one_to_many(self, x: StructuredObject, batch: ObjectBatch) -> np.ndarray:
        """x 到批内每个对象的距离（按原始顺序）"""
        x.expect(self.kind)
        if batch.size and _feature_dim(x) != batch.feature_dim:
            raise DimensionMismatchError(f"{self.name}: 维度不一致 ({_feature_dim(x)} vs {batch.feature_dim})")
        out = np.empty(batch.size, dtype=np.float64)
        raw = _raw(x)
        for index, stack in batch.groups:
            out[index] = self._batch(raw, stack)
        return out

    def evaluate(self, a: StructuredObject, b: StructuredObject) -> float:
        """单对求值"""
        self._check_pair(a, b)
        return float(self._batch(_raw(a), _raw(b)[None, ...])[0])

    def __call__(self, a: StructuredObject, b: StructuredObject) -> float:
        return self.evaluate(a, b)

    def describe(self) -> Dict[str, object]:
        return {"name": self.name, "kind": self.kind.value, "axioms": self.axioms.to_dict()}

    def __repr__(self) -> str:
        return f"<Measure: {self.name}>"


class DtwMeasure(BaseMeasure):
    """经典 DTW，无窗口约束，不按路径长度归一化"""
    name = "dtw"
    kind = ObjectKind.TIME_SERIES
    axioms = MetricAxioms(non_negativity=True, identity=False, symmetry=True, triangle=False)

    def _batch(self, x, stack):
        return dtw_batch(x, stack)


class EditMeasure(BaseMeasure):
    """Levenshtein 距离，插入/删除/替换代价均为 1"""
    name = "edit"
    kind = ObjectKind.STRING
    axioms = MetricAxioms(non_negativity=True, identity=True, symmetry=True, triangle=True)

    def _batch(self, x, stack):
        return edit_batch(x, stack).astype(np.float64)

    def exact(self, a: StructuredObject, b: StructuredObject) -> int:
        """整数形式的编辑距离"""
        self._check_pair(a, b)
        return int(edit_batch(_raw(a), _raw(b)[None, :])[0])


class ModHausdorffMeasure(BaseMeasure):
    """修正 Hausdorff 距离（两个方向的平均最近距离取最大），地面距离为欧氏距离"""
    name = "mod-hausdorff"
    kind = ObjectKind.VECTOR_SET
    axioms = MetricAxioms(non_negativity=True, identity=False, symmetry=True, triangle=False)

    def _batch(self, x, stack):
        return mod_hausdorff_batch(x, stack)


_MEASURES = {
    "dtw": DtwMeasure,
    "edit": EditMeasure,
    "mod-hausdorff": ModHausdorffMeasure,
}

DEFAULT_MEASURE_FOR_KIND = {
    ObjectKind.TIME_SERIES: "dtw",
    ObjectKind.STRING: "edit",
    ObjectKind.VECTOR_SET: "mod-hausdorff",
}


def get_measure(tag) -> BaseMeasure:
    """按标签取度量实例"""
    if isinstance(tag, BaseMeasure):
        return tag
    try:
        return _MEASURES[str(tag)]()
    except KeyError:
        raise InvalidInputError(f"未知的距离度量: {tag!r}（可选: {', '.join(_MEASURES)}）") from None


def measure_for_kind(kind: ObjectKind) -> BaseMeasure:
    return get_measure(DEFAULT_MEASURE_FOR_KIND[kind])


# ---------------------------------------------------------------------------
# 函数式接口
# ---------------------------------------------------------------------------

def dtw(a: TimeSeries, b: TimeSeries) -> float:
    """DTW 距离"""
    if a.n_vars != b.n_vars:
        raise DimensionMismatchError(f"dtw: 变量数不一致 ({a.n_vars} vs {b.n_vars})")
    return float(dtw_batch(a.values, b.values[None, ...])[0])


def edit_distance(a: SymbolString, b: SymbolString) -> int:
    """Levenshtein 编辑距离（精确整数）"""
    if a.alphabet_size != b.alphabet_size:
        raise DimensionMismatchError(f"edit: 字母表大小不一致 ({a.alphabet_size} vs {b.alphabet_size})")
    x = np.asarray(a.symbols, dtype=np.int64)
    y = np.asarray(b.symbols, dtype=np.int64)
    return int(edit_batch(x, y[None, :])[0])


def mod_hausdorff(a: VectorSet, b: VectorSet, ground: str = "euclidean") -> float:
    """修正 Hausdorff 距离"""
    if ground != "euclidean":
        raise InvalidInputError(f"mod_hausdorff 只支持欧氏地面距离，实际 {ground!r}")
    if a.dim != b.dim:
        raise DimensionMismatchError(f"mod_hausdorff: 元素维度不一致 ({a.dim} vs {b.dim})")
    return float(mod_hausdorff_batch(a.elements, b.elements[None, ...])[0])
