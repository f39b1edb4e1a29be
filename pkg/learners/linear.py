"""
嵌入特征上的 L2 正则线性经验风险最小化

    min_w (1/n) Σ ℓ(y_i · wᵀφ̂(x_i)) + (μ/2)‖w‖²,   y_i ∈ {-1, +1}

损失: hinge-squared  ℓ(m) = max(0, 1 - m)²
      logistic       ℓ(m) = log(1 + e^{-m})

多分类用 one-vs-rest；二分类只有一个权重向量（w·x > 0 判为类别 1）。
优化器为全批量 L-BFGS-B，从 w = 0 出发，结果完全由输入决定。

Author: gngdingghuan
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from config import get_config
from utils.error_handler import DimensionMismatchError, InvalidInputError
from utils.logger import log


class LossKind(Enum):
    """损失函数"""
    HINGE_SQUARED = "hinge-squared"
    LOGISTIC = "logistic"


def linear_objective(w: np.ndarray, features: np.ndarray, targets: np.ndarray,
                     mu: float, loss) -> Tuple[float, np.ndarray]:
    """
    单个二分类问题的目标值与解析梯度

    Args:
        w: R 维权重
        features: n×R
        targets: ±1
        mu: 正则系数
        loss: 损失标签
    """
    loss = LossKind(loss)
    n = features.shape[0]
    margins = targets * (features @ w)
    if loss is LossKind.HINGE_SQUARED:
        slack = np.maximum(0.0, 1.0 - margins)
        value = float(np.sum(slack ** 2)) / n
        coef = -2.0 * slack * targets
    else:
        value = float(np.sum(np.logaddexp(0.0, -margins))) / n
        coef = -expit(-margins) * targets
    value += 0.5 * mu * float(w @ w)
    grad = features.T @ coef / n + mu * w
    return value, grad


@dataclass
class LinearModel:
    """one-vs-rest 线性模型（二分类时只有一行权重）"""
    weights: np.ndarray
    mu: float
    loss: LossKind
    n_classes: int
    training_log: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        self.loss = LossKind(self.loss)
        expected = 1 if self.n_classes == 2 else self.n_classes
        if self.weights.shape[0] != expected:
            raise InvalidInputError(f"{self.n_classes} 个类别需要 {expected} 个权重向量，实际 {self.weights.shape[0]}")
        if not np.all(np.isfinite(self.weights)):
            raise InvalidInputError("权重含非有限值")

    @property
    def R(self) -> int:
        return int(self.weights.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "mu": self.mu,
            "loss": self.loss.value,
            "n_classes": self.n_classes,
            "training_log": {k: v for k, v in self.training_log.items() if k != "trace"},
        }

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "LinearModel":
        return cls(
            weights=np.asarray(record["weights"], dtype=np.float64),
            mu=float(record["mu"]),
            loss=record["loss"],
            n_classes=int(record["n_classes"]),
            training_log=dict(record.get("training_log", {})),
        )


def _check_features(features) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise DimensionMismatchError(f"特征矩阵必须是二维的，实际 {features.ndim} 维")
    if not np.all(np.isfinite(features)):
        raise InvalidInputError("特征矩阵含非有限值")
    return features


def _solve_binary(features: np.ndarray, targets: np.ndarray, mu: float, loss: LossKind,
                  tol: float, max_iter: int) -> Tuple[np.ndarray, Dict[str, Any]]:
    R = features.shape[1]
    w0 = np.zeros(R)
    f0, _ = linear_objective(w0, features, targets, mu, loss)
    trace: List[float] = [f0]

    def _fun(w):
        return linear_objective(w, features, targets, mu, loss)

    def _callback(wk):
        trace.append(_fun(wk)[0])

    result = minimize(
        _fun, w0, jac=True, method="L-BFGS-B", callback=_callback,
        options={"maxiter": max_iter, "gtol": tol, "ftol": np.finfo(float).eps},
    )
    w = result.x
    value, grad = _fun(w)
    if value > f0:
        w, value, grad = w0, f0, _fun(w0)[1]
    grad_norm = float(np.linalg.norm(grad))
    info = {
        "iterations": int(result.nit),
        "final_objective": float(value),
        "initial_objective": float(f0),
        "gradient_norm": grad_norm,
        "converged": grad_norm <= tol,
        "stop_reason": "gradient-tolerance" if grad_norm <= tol else (
            "max-iter" if result.nit >= max_iter else str(result.message)),
        "trace": trace,
    }
    return w, info


def train_linear(
    features: np.ndarray,
    labels: Sequence[int],
    mu: float,
    loss: Optional[str] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    n_classes: Optional[int] = None,
) -> LinearModel:
    """
    训练 one-vs-rest 线性分类器

    Args:
        features: n×R 特征矩阵
        labels: 类别下标
        mu: 正则系数（> 0）
        loss: hinge-squared / logistic，默认取配置
        tol: 梯度范数阈值
        max_iter: 最大迭代次数
        n_classes: 类别总数（交叉验证折上沿用全集的类别数）
    """
    opt = get_config().optimizer
    loss = LossKind(loss or opt.loss)
    tol = opt.tol if tol is None else tol
    max_iter = opt.max_iter if max_iter is None else max_iter

    features = _check_features(features)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    n = features.shape[0]
    if n != len(labels):
        raise DimensionMismatchError(f"特征行数 {n} 与标签数 {len(labels)} 不一致")
    if n < 2:
        raise InvalidInputError(f"至少需要 2 个训练样本，实际 {n}")
    if not mu > 0:
        raise InvalidInputError(f"mu 必须为正，实际 {mu}")
    present = np.unique(labels)
    if len(present) < 2:
        raise InvalidInputError("训练数据只有一个类别")
    n_classes = int(n_classes if n_classes is not None else labels.max() + 1)

    problems = [1] if n_classes == 2 else list(range(n_classes))
    weights = []
    logs = []
    for c in problems:
        targets = np.where(labels == c, 1.0, -1.0)
        w, info = _solve_binary(features, targets, mu, loss, tol, max_iter)
        weights.append(w)
        logs.append(info)

    training_log = {
        "iterations": [info["iterations"] for info in logs],
        "final_objective": [info["final_objective"] for info in logs],
        "converged": all(info["converged"] for info in logs),
        "stop_reason": [info["stop_reason"] for info in logs],
        "trace": [info["trace"] for info in logs],
    }
    log.debug(f"线性模型训练完成: n={n}, R={features.shape[1]}, μ={mu}, loss={loss.value}, "
              f"收敛={training_log['converged']}")
    return LinearModel(np.vstack(weights), mu, loss, n_classes, training_log)


def decision_scores(model: LinearModel, features: np.ndarray) -> np.ndarray:
    """每个类别的得分 wᵀφ̂(x)；二分类时类别 0 的得分恒为 0"""
    features = _check_features(features)
    if features.shape[1] != model.R:
        raise DimensionMismatchError(f"特征宽度 {features.shape[1]} 与模型 R={model.R} 不一致")
    scores = features @ model.weights.T
    if model.n_classes == 2:
        scores = np.hstack([np.zeros((scores.shape[0], 1)), scores])
    return scores


def predict_linear(model: LinearModel, features: np.ndarray) -> np.ndarray:
    """argmax 得分，平局取最小类别下标"""
    return np.argmax(decision_scores(model, features), axis=1).astype(np.int64)
