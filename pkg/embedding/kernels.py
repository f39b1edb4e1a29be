"""
Gram 矩阵与距离替换核（DSK_RBF / DSK_ND）

DSK 矩阵按原样交给核学习器，不做半正定修复。

Author: gngdingghuan
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np
from scipy import linalg

from utils.error_handler import InvalidInputError

SYMMETRY_TOL = 1e-12


class GramConstruction(Enum):
    """Gram 矩阵的构造方式"""
    D2KE_RF = "d2ke-rf"
    DSK_RBF = "dsk-rbf"
    DSK_ND = "dsk-nd"
    EXACT_MC = "exact-mc"


def _symmetric_within(matrix: np.ndarray, tol: float) -> bool:
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    return bool(np.all(np.abs(matrix - matrix.T) <= tol * scale))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """对称 n×n 核矩阵"""
    values: np.ndarray
    construction: GramConstruction
    psd_certified: bool = False
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise InvalidInputError(f"Gram 矩阵必须是方阵，实际形状 {values.shape}")
        if not _symmetric_within(values, SYMMETRY_TOL):
            raise InvalidInputError("Gram 矩阵不对称")
        if not np.all(np.isfinite(np.diag(values))):
            raise InvalidInputError("Gram 矩阵对角线含非有限值")
        values = 0.5 * (values + values.T)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "construction", GramConstruction(self.construction))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def min_eigenvalue(self) -> float:
        """最小特征值"""
        if self.n == 0:
            return 0.0
        return float(linalg.eigvalsh(self.values, subset_by_index=[0, 0])[0])


def gram_from_features(features: np.ndarray, construction=GramConstruction.D2KE_RF) -> GramMatrix:
    """显式特征的 Gram 矩阵（构造上半正定）"""
    features = np.asarray(features, dtype=np.float64)
    return GramMatrix(features @ features.T, construction, psd_certified=True,
                      metadata={"R": int(features.shape[1]) if features.ndim == 2 else 0})


def validate_distance_matrix(D: np.ndarray, square: bool = True) -> np.ndarray:
    """检查距离矩阵：非负；方阵时还要求对称、对角线为 0"""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2:
        raise InvalidInputError(f"距离矩阵必须是二维的，实际 {D.ndim} 维")
    if not np.all(np.isfinite(D)):
        raise InvalidInputError("距离矩阵含非有限值")
    if np.any(D < 0):
        raise InvalidInputError("距离矩阵含负值")
    if square:
        if D.shape[0] != D.shape[1]:
            raise InvalidInputError(f"距离矩阵必须是方阵，实际形状 {D.shape}")
        if not _symmetric_within(D, SYMMETRY_TOL):
            raise InvalidInputError("距离矩阵不对称")
        if np.any(np.diag(D) != 0):
            raise InvalidInputError("距离矩阵对角线必须为 0")
    return D


def _dsk_values(kind: GramConstruction, gamma: float, D: np.ndarray) -> np.ndarray:
    if kind is GramConstruction.DSK_RBF:
        if not gamma > 0:
            raise InvalidInputError(f"gamma 必须为正，实际 {gamma}")
        return np.exp(-gamma * D ** 2)
    if kind is GramConstruction.DSK_ND:
        return -(D ** 2)
    raise InvalidInputError(f"不是距离替换核: {kind.value}")


def dsk_kernel(kind, gamma: float, D: np.ndarray) -> GramMatrix:
    """
    距离替换核
    - dsk-rbf: K = exp(-γ D²)
    - dsk-nd:  K = -D²
    """
    kind = GramConstruction(kind)
    D = validate_distance_matrix(D)
    return GramMatrix(_dsk_values(kind, gamma, D), kind, psd_certified=False, metadata={"gamma": gamma})


def dsk_cross_kernel(kind, gamma: float, D_cross: np.ndarray) -> np.ndarray:
    """新样本 × 训练样本的距离替换核（用于预测）"""
    kind = GramConstruction(kind)
    return _dsk_values(kind, gamma, validate_distance_matrix(D_cross, square=False))
