"""
桌面规模的合成分类任务
- motif-string:  是否包含固定的 3 符号片段
- shifted-sine:  随机相位正弦序列，类别为频段
- two-cluster:   向量集合的元素围绕两个中心之一

Author: gngdingghuan
"""

from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np

from core.dataset import Dataset
from core.objects import StructuredObject, SymbolString, TimeSeries, VectorSet
from utils.error_handler import InvalidInputError
from utils.logger import log


class SyntheticTask(Enum):
    """合成任务"""
    MOTIF_STRING = "motif-string"
    SHIFTED_SINE = "shifted-sine"
    TWO_CLUSTER = "two-cluster"

    @classmethod
    def parse(cls, tag) -> "SyntheticTask":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag))
        except ValueError:
            choices = ", ".join(t.value for t in cls)
            raise InvalidInputError(f"未知的合成任务: {tag!r}（可选: {choices}）") from None


# 背景符号只取字母表前 3 个，片段中的 'd' 只会出现在片段里
MOTIF_PARAMS: Dict[str, Any] = {
    "alphabet": "abcd",
    "background_symbols": 3,
    "motif": "dbd",
    "length": (10, 14),
}

SINE_PARAMS: Dict[str, Any] = {
    "length": (30, 50),
    "bands": ((1.0, 2.0), (3.5, 5.0)),  # 每条序列的周期数
    "noise_std": 0.1,
}

CLUSTER_PARAMS: Dict[str, Any] = {
    "dim": 2,
    "size": (5, 10),
    "centers": ((0.6, 0.0), (-0.6, 0.0)),
    "noise_std": 0.5,
}


def _balanced_labels(n: int, rng: np.random.Generator) -> np.ndarray:
    labels = np.arange(n, dtype=np.int64) % 2
    return labels[rng.permutation(n)]


def _contains(symbols: List[int], motif: Tuple[int, ...]) -> bool:
    m = len(motif)
    return any(tuple(symbols[i:i + m]) == motif for i in range(len(symbols) - m + 1))


def _motif_string(label: int, rng: np.random.Generator) -> StructuredObject:
    params = MOTIF_PARAMS
    alphabet = params["alphabet"]
    motif = tuple(alphabet.index(ch) for ch in params["motif"])
    length = int(rng.integers(params["length"][0], params["length"][1] + 1))
    while True:
        symbols = rng.integers(0, params["background_symbols"], size=length).tolist()
        if label == 1:
            pos = int(rng.integers(0, length - len(motif) + 1))
            symbols[pos:pos + len(motif)] = motif
            break
        if not _contains(symbols, motif):
            break
    return StructuredObject(SymbolString(tuple(symbols), len(alphabet)))


def _shifted_sine(label: int, rng: np.random.Generator) -> StructuredObject:
    params = SINE_PARAMS
    length = int(rng.integers(params["length"][0], params["length"][1] + 1))
    low, high = params["bands"][label]
    cycles = rng.uniform(low, high)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    t = np.arange(length, dtype=np.float64)
    values = np.sin(2.0 * np.pi * cycles * t / length + phase)
    values = values + rng.normal(0.0, params["noise_std"], size=length)
    return StructuredObject(TimeSeries(values.reshape(-1, 1)))


def _two_cluster(label: int, rng: np.random.Generator) -> StructuredObject:
    params = CLUSTER_PARAMS
    size = int(rng.integers(params["size"][0], params["size"][1] + 1))
    center = np.asarray(params["centers"][label], dtype=np.float64)
    elements = center + rng.normal(0.0, params["noise_std"], size=(size, params["dim"]))
    return StructuredObject(VectorSet(elements))


_GENERATORS = {
    SyntheticTask.MOTIF_STRING: (_motif_string, MOTIF_PARAMS),
    SyntheticTask.SHIFTED_SINE: (_shifted_sine, SINE_PARAMS),
    SyntheticTask.TWO_CLUSTER: (_two_cluster, CLUSTER_PARAMS),
}


def gen_synthetic(task, n: int, seed: int) -> Dataset:
    """
    生成合成数据集

    Args:
        task: 任务标签（SyntheticTask 或其字符串值）
        n: 样本数（≥ 4）
        seed: 随机种子，完全决定生成结果

    Returns:
        类别均衡（两类数量差 ≤ 1）的 Dataset，任务参数记录在 metadata 中
    """
    task = SyntheticTask.parse(task)
    if n < 4:
        raise InvalidInputError(f"合成数据集至少需要 4 个样本，实际 {n}")

    rng = np.random.default_rng(seed)
    labels = _balanced_labels(n, rng)
    generate, params = _GENERATORS[task]
    objects = tuple(generate(int(label), rng) for label in labels)

    metadata: Dict[str, Any] = {
        "source": "synthetic",
        "task": task.value,
        "seed": int(seed),
        "n": int(n),
        "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()},
    }
    if task is SyntheticTask.MOTIF_STRING:
        metadata["alphabet"] = MOTIF_PARAMS["alphabet"]
    log.debug(f"生成合成数据集 {task.value}: n={n}, seed={seed}")
    return Dataset(objects, labels, "full", metadata)
