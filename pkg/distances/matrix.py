"""
距离矩阵计算（并行、确定性）

所有批量距离计算都经过这里，审计钩子可以据此检查每次计算涉及的对象。

Author: gngdingghuan
"""

from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from core.objects import StructuredObject
from distances.measures import BaseMeasure, get_measure
from utils.logger import log
from utils.parallel import WorkerPool

AuditHook = Callable[[str, Sequence[StructuredObject]], None]

_audit_hooks: List[AuditHook] = []


@contextmanager
def audit_hook(hook: AuditHook) -> Iterator[AuditHook]:
    """在代码块内注册审计钩子：hook(操作名, 涉及的对象)"""
    _audit_hooks.append(hook)
    try:
        yield hook
    finally:
        _audit_hooks.remove(hook)


def _notify(operation: str, objects: Sequence[StructuredObject]) -> None:
    for hook in list(_audit_hooks):
        hook(operation, objects)


def cross_distances(
    xs: Sequence[StructuredObject],
    ys: Sequence[StructuredObject],
    measure,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    len(xs) × len(ys) 距离矩阵，按行并行，结果与线程数无关
    """
    measure: BaseMeasure = get_measure(measure)
    _notify("cross", list(xs) + list(ys))
    out = np.empty((len(xs), len(ys)), dtype=np.float64)
    if len(xs) == 0 or len(ys) == 0:
        return out
    batch = measure.prepare(ys)

    def _rows(rows: range) -> None:
        for i in rows:
            out[i] = measure.one_to_many(xs[i], batch)

    WorkerPool(threads).map_chunks(_rows, len(xs))
    log.debug(f"{measure.name} 距离矩阵 {out.shape[0]}×{out.shape[1]} 计算完成")
    return out


def pairwise_distances(
    objects: Sequence[StructuredObject],
    measure,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    对称的 n×n 距离矩阵：只计算上三角并镜像，对角线为 0
    """
    measure: BaseMeasure = get_measure(measure)
    objects = list(objects)
    _notify("pairwise", objects)
    n = len(objects)
    out = np.zeros((n, n), dtype=np.float64)
    if n < 2:
        return out

    def _row(i: int) -> None:
        batch = measure.prepare(objects[i + 1:])
        out[i, i + 1:] = measure.one_to_many(objects[i], batch)

    WorkerPool(threads).map(_row, range(n - 1))
    upper = np.triu(out, k=1)
    out = upper + upper.T
    log.debug(f"{measure.name} 成对距离矩阵 {n}×{n} 计算完成")
    return out
