"""
预计算 Gram 矩阵上的核岭分类（DSK 基线）

    (K + λI) α = Y,   Y[i, c] = +1 若 y_i = c，否则 -1

K 不定时照样求解，只要 K + λI 非奇异。

Author: gngdingghuan
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from embedding.kernels import GramConstruction, GramMatrix
from utils.error_handler import DimensionMismatchError, InvalidInputError, SingularSystemError
from utils.logger import log

# 条件数超过此值视为数值奇异
MAX_CONDITION = 1e12


@dataclass
class KernelModel:
    """对偶系数 n_train × n_classes"""
    coefficients: np.ndarray
    lam: float
    construction: GramConstruction
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_train(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def n_classes(self) -> int:
        return int(self.coefficients.shape[1])


def one_vs_rest_targets(labels: np.ndarray, n_classes: int) -> np.ndarray:
    """±1 目标矩阵"""
    labels = np.asarray(labels, dtype=np.int64)
    return np.where(labels[:, None] == np.arange(n_classes)[None, :], 1.0, -1.0)


def train_kernel(K: Union[GramMatrix, np.ndarray], labels: Sequence[int], lam: float,
                 n_classes: Optional[int] = None, construction=GramConstruction.DSK_RBF) -> KernelModel:
    """
    求解核岭系统

    Args:
        K: 训练集 Gram 矩阵
        labels: 类别下标
        lam: 对角平移 λ（> 0）
        n_classes: 类别总数
        construction: K 为数组时记录的构造方式
    """
    if isinstance(K, GramMatrix):
        construction = K.construction
        values = K.values
    else:
        construction = GramConstruction(construction)
        values = GramMatrix(np.asarray(K, dtype=np.float64), construction).values
    if not lam > 0:
        raise InvalidInputError(f"lambda 必须为正，实际 {lam}")
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    n = values.shape[0]
    if len(labels) != n:
        raise DimensionMismatchError(f"Gram 矩阵大小 {n} 与标签数 {len(labels)} 不一致")
    n_classes = int(n_classes if n_classes is not None else labels.max() + 1)

    system = values + lam * np.eye(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = float(np.linalg.cond(system))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularSystemError(f"K + λI 数值奇异（条件数 {condition:.3e}，λ={lam}），请增大 λ")
    try:
        alpha = linalg.solve(system, one_vs_rest_targets(labels, n_classes), assume_a="sym")
    except linalg.LinAlgError as e:
        raise SingularSystemError(f"K + λI 求解失败: {e}，请增大 λ") from None

    log.debug(f"核岭训练完成: n={n}, λ={lam}, 构造={construction.value}, 条件数={condition:.3e}")
    return KernelModel(alpha, lam, construction, metadata={"condition": condition})


def predict_kernel(model: KernelModel, K_cross: np.ndarray) -> np.ndarray:
    """
    由 m × n_train 交叉核矩阵预测类别（平局取最小下标）
    """
    K_cross = np.atleast_2d(np.asarray(K_cross, dtype=np.float64))
    if K_cross.shape[1] != model.n_train:
        raise DimensionMismatchError(f"交叉核需要 {model.n_train} 列，实际 {K_cross.shape[1]}")
    return np.argmax(K_cross @ model.coefficients, axis=1).astype(np.int64)
