"""
ω 抽样器

每个下标 j 使用独立派生的种子 seed_j = derive_seed(master, j)：

    mix64(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27; z *= 0x94D049BB133111EB
               z ^= z >> 31            （SplitMix64 终结函数，模 2^64）
    derive_seed(master, j) = mix64(mix64(master) + (j + 1) * 0x9E3779B97F4A7C15)

因此生成结果与线程数无关，且大小为 R₂ 的样本前 R₁ 个对象等于大小为 R₁ 的样本。

Author: gngdingghuan
"""

import json
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from core.dataset import Dataset
from core.formats import load_dataset, write_dataset
from core.objects import StructuredObject, SymbolString, TimeSeries, VectorSet
from sampling.distributions import (
    DataHoldout,
    OmegaDistribution,
    RandomString,
    RandomTimeSeries,
    RandomVectorSet,
    distribution_from_dict,
)
from utils.error_handler import DataFormatError, InvalidInputError
from utils.logger import log
from utils.parallel import WorkerPool

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 终结函数"""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def derive_seed(master: int, index: Union[int, str]) -> int:
    """由主种子和下标（或字符串标签）派生子种子"""
    if isinstance(index, str):
        index = zlib.crc32(index.encode("utf-8")) + (1 << 32)
    return mix64(mix64(int(master)) + ((int(index) + 1) * GOLDEN64 & MASK64))


def unit_sphere_vector(p: int, rng: np.random.Generator) -> np.ndarray:
    """单位球面上的均匀随机向量（标准高斯归一化）"""
    if p < 1:
        raise InvalidInputError(f"维度 p 必须 ≥ 1，实际 {p}")
    while True:
        v = rng.standard_normal(p)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm


@dataclass(frozen=True, eq=False)
class OmegaSample:
    """冻结的 ω 样本"""
    objects: Tuple[StructuredObject, ...]
    seed: int
    distribution: OmegaDistribution

    def __len__(self) -> int:
        return len(self.objects)

    @property
    def kind(self):
        return self.distribution.kind

    def prefix(self, R: int) -> "OmegaSample":
        """前 R 个对象（等价于以相同种子抽取 R 个）"""
        if not 1 <= R <= len(self.objects):
            raise InvalidInputError(f"prefix R={R} 超出样本大小 {len(self.objects)}")
        return OmegaSample(self.objects[:R], self.seed, self.distribution)

    def regenerate(self) -> "OmegaSample":
        """用记录的种子与分布重新抽样"""
        return sample_omegas(self.distribution, len(self.objects), self.seed)

    def describe(self) -> Dict[str, Any]:
        return {"R": len(self.objects), "seed": self.seed, "distribution": self.distribution.to_dict()}


def _draw_random(dist: OmegaDistribution, seed: int) -> StructuredObject:
    rng = np.random.default_rng(seed)
    if isinstance(dist, RandomTimeSeries):
        length = int(rng.integers(dist.length_min, dist.length_max + 1))
        values = rng.normal(0.0, dist.element_std, size=(length, dist.n_vars))
        return StructuredObject(TimeSeries(values))
    if isinstance(dist, RandomString):
        length = int(rng.integers(dist.length_min, dist.length_max + 1))
        symbols = rng.integers(0, dist.alphabet_size, size=length)
        return StructuredObject(SymbolString(tuple(symbols.tolist()), dist.alphabet_size))
    if isinstance(dist, RandomVectorSet):
        size = int(rng.integers(dist.size_min, dist.size_max + 1))
        elements = np.stack([unit_sphere_vector(dist.dim, rng) for _ in range(size)])
        return StructuredObject(VectorSet(elements))
    raise InvalidInputError(f"不支持的分布: {type(dist).__name__}")


def _holdout_indices(dist: DataHoldout, R: int, seed: int) -> np.ndarray:
    n = len(dist.source)
    if dist.without_replacement:
        if R > n:
            raise InvalidInputError(f"无放回抽样要求 R ≤ |source|，实际 R={R} > {n}")
        order = np.random.default_rng(derive_seed(seed, "holdout-permutation")).permutation(n)
        return order[:R]
    return np.array([np.random.default_rng(derive_seed(seed, j)).integers(n) for j in range(R)], dtype=np.int64)


def sample_omegas(dist: OmegaDistribution, R: int, seed: int, threads: Optional[int] = None) -> OmegaSample:
    """
    从 p(ω) 抽取 R 个对象

    Args:
        dist: 分布规格
        R: 样本数（≥ 1）
        seed: 主种子
        threads: 工作线程数（不影响结果）
    """
    if R < 1:
        raise InvalidInputError(f"R 必须 ≥ 1，实际 {R}")
    if isinstance(dist, DataHoldout):
        if dist.source is None:
            raise InvalidInputError("DataHoldout 缺少来源数据集，无法抽样")
        indices = _holdout_indices(dist, R, seed)
        objects = tuple(dist.source.objects[int(i)] for i in indices)
    else:
        objects = tuple(WorkerPool(threads).map(lambda j: _draw_random(dist, derive_seed(seed, j)), range(R)))
    log.debug(f"抽取 ω: {dist.tag}, R={R}, seed={seed}")
    return OmegaSample(objects, int(seed), dist)


def save_omega_sample(sample: OmegaSample, path: Union[str, Path], alphabet: Optional[str] = None) -> Path:
    """写出 ω 样本：数据集格式 + #omega 头记录种子与分布"""
    header = json.dumps(sample.describe(), sort_keys=True)
    metadata = {"alphabet": alphabet} if alphabet else {}
    data = Dataset(sample.objects, np.zeros(len(sample), dtype=np.int64), "full", metadata)
    return write_dataset(data, path, directives={"omega": header})


def load_omega_sample(path: Union[str, Path], source: Optional[Dataset] = None) -> OmegaSample:
    """读取 save_omega_sample 写出的文件"""
    data = load_dataset(path)
    header = data.metadata.get("directives", {}).get("omega")
    if not header:
        raise DataFormatError("缺少 #omega 头", path=str(path))
    try:
        record = json.loads(header)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"#omega 头不是合法 JSON: {e.msg}", path=str(path)) from None
    dist = distribution_from_dict(record["distribution"], source)
    return OmegaSample(data.objects, int(record["seed"]), dist)
