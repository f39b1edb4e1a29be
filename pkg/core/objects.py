"""
结构化对象类型
时间序列 / 符号串 / 向量多重集，以及带类型标签的统一包装

Author: gngdingghuan
"""

import hashlib
from enum import Enum
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from utils.error_handler import DimensionMismatchError, InvalidInputError, KindMismatchError


class ObjectKind(Enum):
    """对象类型枚举"""
    TIME_SERIES = "time-series"
    STRING = "string"
    VECTOR_SET = "vector-set"


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim == 1 and ndim == 2:
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise DimensionMismatchError(f"{name} 需要 {ndim} 维数组，实际为 {array.ndim} 维")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} 含有非有限值")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """多变量时间序列，形状 T×V"""
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values, 2, "TimeSeries")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidInputError(f"TimeSeries 需要 T ≥ 1 且 V ≥ 1，实际形状 {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_vars(self) -> int:
        return int(self.values.shape[1])

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeSeries) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class SymbolString:
    """字母表下标序列（允许空串）"""
    symbols: Tuple[int, ...]
    alphabet_size: int

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        if self.alphabet_size < 1:
            raise InvalidInputError(f"alphabet_size 必须为正，实际 {self.alphabet_size}")
        for s in symbols:
            if s < 0 or s >= self.alphabet_size:
                raise InvalidInputError(f"符号下标 {s} 超出字母表大小 {self.alphabet_size}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def from_text(cls, text: str, alphabet: str) -> "SymbolString":
        """按字母表把字符映射为下标"""
        index = {ch: i for i, ch in enumerate(alphabet)}
        try:
            return cls(tuple(index[ch] for ch in text), len(alphabet))
        except KeyError as e:
            raise InvalidInputError(f"字符 {e.args[0]!r} 不在字母表 {alphabet!r} 中") from None

    def to_text(self, alphabet: str) -> str:
        return "".join(alphabet[s] for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True, eq=False)
class VectorSet:
    """向量多重集（允许重复元素，不允许为空）"""
    elements: np.ndarray

    def __post_init__(self):
        elements = _frozen_array(self.elements, 2, "VectorSet")
        if elements.shape[0] < 1:
            raise InvalidInputError("VectorSet 不能为空")
        if elements.shape[1] < 1:
            raise InvalidInputError("VectorSet 元素维度必须 ≥ 1")
        object.__setattr__(self, "elements", elements)

    @property
    def size(self) -> int:
        return int(self.elements.shape[0])

    @property
    def dim(self) -> int:
        return int(self.elements.shape[1])

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorSet) and np.array_equal(self.elements, other.elements)

    def __hash__(self) -> int:
        return hash(self.elements.tobytes())


Payload = Union[TimeSeries, SymbolString, VectorSet]

_KIND_OF = {
    TimeSeries: ObjectKind.TIME_SERIES,
    SymbolString: ObjectKind.STRING,
    VectorSet: ObjectKind.VECTOR_SET,
}


@dataclass(frozen=True)
class StructuredObject:
    """带类型标签的结构化对象，构造后类型不可变"""
    value: Payload

    def __post_init__(self):
        if type(self.value) not in _KIND_OF:
            raise KindMismatchError(f"不支持的对象类型: {type(self.value).__name__}")

    @property
    def kind(self) -> ObjectKind:
        return _KIND_OF[type(self.value)]

    @classmethod
    def time_series(cls, values) -> "StructuredObject":
        return cls(TimeSeries(np.asarray(values, dtype=np.float64)))

    @classmethod
    def string(cls, symbols: Sequence[int], alphabet_size: int) -> "StructuredObject":
        return cls(SymbolString(tuple(symbols), alphabet_size))

    @classmethod
    def vector_set(cls, elements) -> "StructuredObject":
        return cls(VectorSet(np.asarray(elements, dtype=np.float64)))

    def expect(self, kind: ObjectKind) -> Payload:
        """取出载荷，类型不符时报错"""
        if self.kind is not kind:
            raise KindMismatchError(f"需要 {kind.value}，实际为 {self.kind.value}")
        return self.value

    def fingerprint(self) -> bytes:
        """内容摘要，用于去重和校验"""
        h = hashlib.sha256(self.kind.value.encode())
        value = self.value
        if isinstance(value, SymbolString):
            h.update(np.asarray(value.symbols, dtype=np.int64).tobytes())
            h.update(str(value.alphabet_size).encode())
        elif isinstance(value, TimeSeries):
            h.update(str(value.values.shape).encode())
            h.update(value.values.tobytes())
        else:
            h.update(str(value.elements.shape).encode())
            h.update(value.elements.tobytes())
        return h.digest()
