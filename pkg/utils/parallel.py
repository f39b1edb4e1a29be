"""
并行工作池
基于线程池按块执行，结果写回固定位置，输出与调度顺序无关

Author: gngdingghuan
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from config import get_config
from utils.logger import log

T = TypeVar("T")
R = TypeVar("R")


def chunk_ranges(total: int, chunk_size: int) -> List[range]:
    """把 [0, total) 切成连续块"""
    chunk_size = max(1, int(chunk_size))
    return [range(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


class WorkerPool:
    """
    确定性工作池
    - threads=1 时在当前线程内顺序执行
    - 每个任务的结果按任务下标写回，保证与线程数无关
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = max(1, int(threads if threads is not None else get_config().parallel.threads))

    def map(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """对每个元素执行 func，结果顺序与输入一致"""
        items = list(items)
        if self.threads == 1 or len(items) <= 1:
            return [func(item) for item in items]

        results: List[Optional[R]] = [None] * len(items)

        def _run(index: int) -> None:
            results[index] = func(items[index])

        with ThreadPoolExecutor(max_workers=min(self.threads, len(items))) as executor:
            futures = [executor.submit(_run, i) for i in range(len(items))]
            for future in futures:
                # 传播第一个异常
                future.result()

        log.debug(f"WorkerPool 完成 {len(items)} 个任务（线程数 {self.threads}）")
        return results  # type: ignore[return-value]

    def map_chunks(self, func: Callable[[range], None], total: int, chunk_size: Optional[int] = None) -> None:
        """按行块执行 func(rows)，func 负责写入预分配的输出"""
        chunk_size = chunk_size or get_config().parallel.chunk_rows
        self.map(func, chunk_ranges(total, chunk_size))
