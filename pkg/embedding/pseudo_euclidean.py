"""
伪欧氏线性嵌入（GDK_LED）

    B = -½ J D⁽²⁾ J,  J = I - 11ᵀ/n
    对 B 做对称特征分解，取 |λ| 最大的 r 个特征对，坐标第 k 列 = v_k √|λ_k|

负特征值的处理：clip 置零、flip 取绝对值、keep-signed 保留符号（记录在 signature 中）。
新样本按经典 MDS 的样本外公式投影：

    b = -½ (d² - mean(d²) - rowmean(D⁽²⁾) + mean(D⁽²⁾))
    y_k = sign(λ_k) · (b·v_k) / √|λ_k|

训练样本代入该公式恰好得到自己的坐标 v_k √|λ_k|。

Author: gngdingghuan
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict

import numpy as np
from scipy import linalg

from embedding.kernels import validate_distance_matrix
from utils.error_handler import DimensionMismatchError, EigenSolverError, InvalidInputError
from utils.logger import log

EIGEN_TOL = 1e-12


class EigenTreatment(Enum):
    """负特征值处理方式"""
    CLIP = "clip"
    FLIP = "flip"
    KEEP_SIGNED = "keep-signed"


@dataclass(frozen=True, eq=False)
class PseudoEuclideanEmbedding:
    """n×r 坐标与带符号特征值"""
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    treatment: EigenTreatment
    eigenvectors: np.ndarray
    centering: Dict[str, Any] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return int(self.coordinates.shape[1])

    @property
    def signature(self) -> np.ndarray:
        """每列的内积符号（clip 后被置零的列为 0）"""
        sign = np.sign(self.eigenvalues)
        if self.treatment is EigenTreatment.CLIP:
            return np.where(sign > 0, 1.0, 0.0)
        if self.treatment is EigenTreatment.FLIP:
            return np.where(sign != 0, 1.0, 0.0)
        return sign

    def gram(self) -> np.ndarray:
        """坐标在伪欧氏内积下的 Gram 矩阵"""
        return (self.coordinates * self.signature) @ self.coordinates.T

    def transform(self, D_new: np.ndarray) -> np.ndarray:
        """
        把新样本（m × n_train 距离矩阵）投影到同一坐标系
        """
        D_new = validate_distance_matrix(D_new, square=False)
        n = self.eigenvectors.shape[0]
        if D_new.shape[1] != n:
            raise DimensionMismatchError(f"新样本距离矩阵需要 {n} 列，实际 {D_new.shape[1]}")
        sq = D_new ** 2
        row_means = np.asarray(self.centering["row_means"])
        grand_mean = float(self.centering["grand_mean"])
        b = -0.5 * (sq - sq.mean(axis=1, keepdims=True) - row_means[None, :] + grand_mean)
        magnitude = np.abs(self.eigenvalues)
        scale = np.zeros_like(magnitude)
        usable = magnitude > EIGEN_TOL
        scale[usable] = np.sign(self.eigenvalues[usable]) / np.sqrt(magnitude[usable])
        coords = (b @ self.eigenvectors) * scale
        if self.treatment is EigenTreatment.CLIP:
            coords[:, self.eigenvalues <= 0] = 0.0
        return coords


def pseudo_euclidean_embed(D: np.ndarray, r: int, eigen_treatment="clip") -> PseudoEuclideanEmbedding:
    """
    由距离矩阵构造伪欧氏嵌入

    Args:
        D: n×n 对称距离矩阵（对角线为 0）
        r: 目标维度（1 ≤ r ≤ n）
        eigen_treatment: clip / flip / keep-signed
    """
    D = validate_distance_matrix(D)
    treatment = EigenTreatment(eigen_treatment)
    n = D.shape[0]
    if not 1 <= r <= n:
        raise InvalidInputError(f"r 必须满足 1 ≤ r ≤ n={n}，实际 {r}")

    sq = D ** 2
    row_means = sq.mean(axis=1)
    grand_mean = float(sq.mean())
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ sq @ J
    B = 0.5 * (B + B.T)

    try:
        evals, evecs = linalg.eigh(B)
    except (linalg.LinAlgError, ValueError) as e:
        try:
            condition = float(np.linalg.cond(B))
        except np.linalg.LinAlgError:
            condition = float("inf")
        raise EigenSolverError(f"特征分解失败: {e}（条件数 {condition:.3e}，n={n}）") from None

    order = np.argsort(-np.abs(evals), kind="stable")[:r]
    evals = evals[order]
    evecs = evecs[:, order]

    coords = evecs * np.sqrt(np.abs(evals))[None, :]
    if treatment is EigenTreatment.CLIP:
        coords[:, evals <= 0] = 0.0

    n_negative = int(np.sum(evals < -EIGEN_TOL))
    log.debug(f"伪欧氏嵌入: n={n}, r={r}, 负特征值 {n_negative} 个, 处理方式 {treatment.value}")
    return PseudoEuclideanEmbedding(
        coordinates=coords,
        eigenvalues=evals,
        treatment=treatment,
        eigenvectors=evecs,
        centering={"row_means": row_means.tolist(), "grand_mean": grand_mean, "n_negative": n_negative},
    )
