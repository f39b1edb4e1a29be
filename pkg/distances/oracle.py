"""
距离的穷举 oracle（仅用于测试）
- DTW:  枚举所有单调规整路径
- 编辑: 按操作数逐层广度搜索所有编辑脚本
- MHD:  逐元素直接按定义计算
"""

import math
from typing import Iterator, Set, Tuple

from core.objects import StructuredObject, SymbolString, TimeSeries, VectorSet
from distances.measures import BaseMeasure, get_measure
from utils.error_handler import DimensionMismatchError, OracleLimitError

MAX_DTW_LENGTH = 8
MAX_EDIT_LENGTH = 6
MAX_SET_SIZE = 5


def _warping_path_costs(a: TimeSeries, b: TimeSeries) -> Iterator[float]:
    """逐条生成 (0,0)→(Ta-1,Tb-1) 的单调路径代价"""
    ta, tb = a.length, b.length

    def local(i: int, j: int) -> float:
        return math.dist(a.values[i].tolist(), b.values[j].tolist())

    def walk(i: int, j: int, acc: float) -> Iterator[float]:
        acc += local(i, j)
        if i == ta - 1 and j == tb - 1:
            yield acc
            return
        if i + 1 < ta:
            yield from walk(i + 1, j, acc)
        if j + 1 < tb:
            yield from walk(i, j + 1, acc)
        if i + 1 < ta and j + 1 < tb:
            yield from walk(i + 1, j + 1, acc)

    yield from walk(0, 0, 0.0)


def _dtw_oracle(a: TimeSeries, b: TimeSeries) -> float:
    if a.length > MAX_DTW_LENGTH or b.length > MAX_DTW_LENGTH:
        raise OracleLimitError(f"DTW oracle 只支持 T ≤ {MAX_DTW_LENGTH}")
    if a.n_vars != b.n_vars:
        raise DimensionMismatchError("DTW oracle: 变量数不一致")
    return min(_warping_path_costs(a, b))


def _neighbours(s: Tuple[int, ...], alphabet_size: int, max_len: int) -> Iterator[Tuple[int, ...]]:
    """一次插入/删除/替换可达的所有串（长度不超过 max_len）"""
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]
        for c in range(alphabet_size):
            if c != s[i]:
                yield s[:i] + (c,) + s[i + 1:]
    if len(s) < max_len:
        for i in range(len(s) + 1):
            for c in range(alphabet_size):
                yield s[:i] + (c,) + s[i:]


def _edit_oracle(a: SymbolString, b: SymbolString) -> int:
    if len(a) > MAX_EDIT_LENGTH or len(b) > MAX_EDIT_LENGTH:
        raise OracleLimitError(f"编辑距离 oracle 只支持长度 ≤ {MAX_EDIT_LENGTH}")
    if a.alphabet_size != b.alphabet_size:
        raise DimensionMismatchError("编辑距离 oracle: 字母表大小不一致")
    # 最短编辑脚本的中间串长度不会超过 max(|a|, |b|)
    max_len = max(len(a), len(b))
    target = b.symbols
    frontier: Set[Tuple[int, ...]] = {a.symbols}
    seen: Set[Tuple[int, ...]] = set(frontier)
    steps = 0
    while target not in frontier:
        steps += 1
        nxt: Set[Tuple[int, ...]] = set()
        for s in frontier:
            for t in _neighbours(s, a.alphabet_size, max_len):
                if t not in seen:
                    seen.add(t)
                    nxt.add(t)
        frontier = nxt
    return steps


def _mhd_oracle(a: VectorSet, b: VectorSet) -> float:
    if a.size > MAX_SET_SIZE or b.size > MAX_SET_SIZE:
        raise OracleLimitError(f"MHD oracle 只支持集合大小 ≤ {MAX_SET_SIZE}")
    if a.dim != b.dim:
        raise DimensionMismatchError("MHD oracle: 元素维度不一致")
    us = [row.tolist() for row in a.elements]
    vs = [row.tolist() for row in b.elements]
    forward = sum(min(math.dist(u, v) for v in vs) for u in us) / len(us)
    backward = sum(min(math.dist(u, v) for u in us) for v in vs) / len(vs)
    return max(forward, backward)


def oracle_distance(measure, a: StructuredObject, b: StructuredObject) -> float:
    """
    穷举求距离，结果应与快速实现一致

    Raises:
        OracleLimitError: 输入规模超出穷举上限
    """
    measure: BaseMeasure = get_measure(measure)
    x, y = a.expect(measure.kind), b.expect(measure.kind)
    if measure.name == "dtw":
        return _dtw_oracle(x, y)
    if measure.name == "edit":
        return float(_edit_oracle(x, y))
    return _mhd_oracle(x, y)
