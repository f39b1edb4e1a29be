"""
嵌入耗时的规模分析：对 n 和 R 分别拟合 log-log 斜率

Author: gngdingghuan
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.objects import StructuredObject
from distances.measures import get_measure
from embedding.feature_map import EmbeddingModel, embed_dataset
from sampling.distributions import OmegaDistribution
from sampling.sampler import derive_seed, sample_omegas
from utils.error_handler import InvalidInputError
from utils.logger import log

MIN_POINTS = 3


@dataclass
class ScalingReport:
    """耗时网格 seconds[i][j] 对应 (n_list[i], R_list[j])"""
    n_list: List[int]
    R_list: List[int]
    seconds: List[List[float]]
    slope_n: float
    slope_R: float
    degenerate_n: bool
    degenerate_R: bool
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.degenerate_n or self.degenerate_R

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_list": self.n_list,
            "R_list": self.R_list,
            "seconds": self.seconds,
            "slope_n": self.slope_n,
            "slope_R": self.slope_R,
            "degenerate_n": self.degenerate_n,
            "degenerate_R": self.degenerate_R,
            **self.metadata,
        }


def _check_axis(name: str, values: Sequence[int]) -> List[int]:
    values = [int(v) for v in values]
    if len(values) < MIN_POINTS:
        raise InvalidInputError(f"{name} 至少需要 {MIN_POINTS} 个点，实际 {len(values)}")
    if any(v < 1 for v in values) or values != sorted(values):
        raise InvalidInputError(f"{name} 必须为正且升序，实际 {values}")
    return values


def loglog_slope(sizes: Sequence[float], seconds: Sequence[float]) -> Tuple[float, bool]:
    """最小二乘 log-log 斜率；自变量全部相同时返回 (0, True)"""
    x = np.log(np.asarray(sizes, dtype=np.float64))
    if np.ptp(x) == 0:
        return 0.0, True
    y = np.log(np.maximum(np.asarray(seconds, dtype=np.float64), 1e-9))
    return float(np.polyfit(x, y, 1)[0]), False


def timing_scaling_report(
    measure,
    dist: OmegaDistribution,
    n_list: Sequence[int],
    R_list: Sequence[int],
    seed: int,
    objects: Optional[Sequence[StructuredObject]] = None,
    gamma: float = 1.0,
    repeats: int = 3,
    threads: int = 1,
) -> ScalingReport:
    """
    对每个 (n, R) 测量嵌入耗时（距离 + 特征），取 repeats 次中的最小值

    Args:
        measure: 距离度量
        dist: p(ω)
        n_list: 升序的样本数
        R_list: 升序的 R
        seed: 主种子
        objects: 被嵌入的对象（默认从 dist 以派生种子抽取 max(n_list) 个）
        gamma: 核参数（不影响耗时）
        repeats: 每点重复次数
        threads: 工作线程数（默认单线程，便于观察复杂度）
    """
    measure = get_measure(measure)
    n_list = _check_axis("n_list", n_list)
    R_list = _check_axis("R_list", R_list)
    if objects is None:
        objects = sample_omegas(dist, n_list[-1], derive_seed(seed, "timing-objects"), threads).objects
    objects = list(objects)
    if len(objects) < n_list[-1]:
        raise InvalidInputError(f"需要至少 {n_list[-1]} 个对象，实际 {len(objects)}")

    omegas = sample_omegas(dist, R_list[-1], seed, threads)
    # 预热
    embed_dataset(EmbeddingModel(omegas.prefix(R_list[0]), gamma, measure), objects[:n_list[0]], threads)

    seconds = np.zeros((len(n_list), len(R_list)))
    for j, R in enumerate(R_list):
        model = EmbeddingModel(omegas.prefix(R), gamma, measure)
        for i, n in enumerate(n_list):
            best = float("inf")
            for _ in range(max(1, repeats)):
                start = time.perf_counter()
                embed_dataset(model, objects[:n], threads)
                best = min(best, time.perf_counter() - start)
            seconds[i, j] = best
            log.debug(f"耗时 n={n}, R={R}: {best:.4f}s")

    # 每个轴上对另一轴取对数平均后拟合
    log_seconds = np.log(np.maximum(seconds, 1e-9))
    slope_n, degenerate_n = loglog_slope(n_list, np.exp(log_seconds.mean(axis=1)))
    slope_R, degenerate_R = loglog_slope(R_list, np.exp(log_seconds.mean(axis=0)))
    if degenerate_n or degenerate_R:
        log.warning("规模扫描退化：某个轴上的取值全部相同")
    log.info(f"规模分析: n 斜率 {slope_n:.3f}，R 斜率 {slope_R:.3f}")
    return ScalingReport(
        n_list, R_list, seconds.tolist(), slope_n, slope_R, degenerate_n, degenerate_R,
        metadata={"measure": measure.name, "seed": seed, "threads": threads, "repeats": repeats,
                  "distribution": dist.to_dict()},
    )
