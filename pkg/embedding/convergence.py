"""
随机特征核的 Monte-Carlo 收敛分析

对每个 R 和每次试验，计算所有对上 |k̃_R - k_ref| 的最大值，k_ref 是用
不相交种子、R_ref = 64 × max(R_list) 个 ω 估计的参考核。
每次试验只抽一次 max(R_list) 个 ω，较小的 R 取其前缀。

Author: gngdingghuan
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.objects import StructuredObject
from distances.matrix import cross_distances
from distances.measures import get_measure
from embedding.feature_map import features_from_distances
from sampling.distributions import OmegaDistribution
from sampling.sampler import derive_seed, sample_omegas
from utils.error_handler import InvalidInputError
from utils.logger import log


@dataclass
class ConvergenceReport:
    """收敛分析结果"""
    R_list: List[int]
    errors: Dict[int, List[float]]
    reference_R: int
    reference_seed: int
    gamma: float
    measure: str
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def mean_errors(self) -> Dict[int, float]:
        return {R: float(np.mean(errs)) for R, errs in self.errors.items()}

    def ratios(self) -> List[float]:
        """相邻 R 之间平均最大误差之比（前一个 / 后一个）"""
        means = self.mean_errors
        out = []
        for a, b in zip(self.R_list[:-1], self.R_list[1:]):
            out.append(float(means[a] / means[b]) if means[b] > 0 else float("inf"))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "R_list": self.R_list,
            "errors": {str(R): errs for R, errs in self.errors.items()},
            "mean_errors": {str(R): v for R, v in self.mean_errors.items()},
            "ratios": self.ratios(),
            "reference_R": self.reference_R,
            "reference_seed": self.reference_seed,
            "gamma": self.gamma,
            "measure": self.measure,
            **self.metadata,
        }


def _dedup_distances(objects: Sequence[StructuredObject], omegas: Sequence[StructuredObject],
                     measure, threads: Optional[int]) -> np.ndarray:
    """对重复的 ω 只计算一次距离"""
    first: Dict[bytes, int] = {}
    inverse = np.empty(len(omegas), dtype=np.int64)
    unique: List[StructuredObject] = []
    for j, omega in enumerate(omegas):
        key = omega.fingerprint()
        if key not in first:
            first[key] = len(unique)
            unique.append(omega)
        inverse[j] = first[key]
    distances = cross_distances(objects, unique, measure, threads)
    return distances[:, inverse]


def _pair_kernels(features: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    return np.einsum("pr,pr->p", features[pairs[:, 0]], features[pairs[:, 1]])


def kernel_convergence_sweep(
    dist: OmegaDistribution,
    gamma: float,
    measure,
    pairs: Sequence[Tuple[StructuredObject, StructuredObject]],
    R_list: Sequence[int],
    seed: int,
    trials: int,
    reference_multiplier: int = 64,
    threads: Optional[int] = None,
) -> ConvergenceReport:
    """
    测量 k̃_R 相对参考核的最大误差随 R 的变化

    Args:
        dist: p(ω)
        gamma: 核参数
        measure: 距离度量
        pairs: 对象对
        R_list: 升序的 R
        seed: 主种子
        trials: 试验次数（≥ 3）
        reference_multiplier: R_ref = multiplier × max(R_list)
    """
    measure = get_measure(measure)
    R_list = [int(R) for R in R_list]
    if not R_list or any(R < 1 for R in R_list) or R_list != sorted(R_list):
        raise InvalidInputError(f"R_list 必须非空、为正且升序，实际 {R_list}")
    if trials < 3:
        raise InvalidInputError(f"trials 必须 ≥ 3，实际 {trials}")
    if not pairs:
        raise InvalidInputError("至少需要一个对象对")

    # 去重后的对象与对下标
    objects: List[StructuredObject] = []
    slot: Dict[int, int] = {}
    index_pairs = []
    for x, y in pairs:
        for obj in (x, y):
            if id(obj) not in slot:
                slot[id(obj)] = len(objects)
                objects.append(obj)
        index_pairs.append((slot[id(x)], slot[id(y)]))
    index_pairs = np.asarray(index_pairs, dtype=np.int64)

    R_max = R_list[-1]
    reference_R = reference_multiplier * R_max
    reference_seed = derive_seed(seed, "reference")
    log.info(f"收敛分析: {len(pairs)} 对, R={R_list}, trials={trials}, R_ref={reference_R}")

    reference = sample_omegas(dist, reference_R, reference_seed, threads)
    ref_distances = _dedup_distances(objects, reference.objects, measure, threads)
    k_ref = _pair_kernels(features_from_distances(ref_distances, gamma), index_pairs)

    errors: Dict[int, List[float]] = {R: [] for R in R_list}
    for t in range(trials):
        sample = sample_omegas(dist, R_max, derive_seed(seed, f"trial-{t}"), threads)
        distances = _dedup_distances(objects, sample.objects, measure, threads)
        for R in R_list:
            k = _pair_kernels(features_from_distances(distances[:, :R], gamma), index_pairs)
            errors[R].append(float(np.max(np.abs(k - k_ref))))
        log.debug(f"试验 {t + 1}/{trials} 完成")

    return ConvergenceReport(R_list, errors, reference_R, reference_seed, gamma, measure.name,
                             metadata={"trials": trials, "seed": seed, "distribution": dist.to_dict()})
