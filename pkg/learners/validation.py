"""
分层 K 折交叉验证与网格搜索

学习器以 LearnerSpec 给出：score(params, train_idx, val_idx) 只能通过下标
访问数据，交叉验证记录每次调用的下标并检查训练折与验证折不相交。

Author: gngdingghuan
"""

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from core.dataset import Dataset, stratified_folds
from utils.error_handler import InvalidInputError, LeakageError
from utils.logger import log
from utils.parallel import WorkerPool

ScoreFn = Callable[[Dict[str, Any], np.ndarray, np.ndarray], float]

# 平局时偏向更强的正则化
REGULARIZATION_KEYS = ("mu", "lam")


@dataclass
class LearnerSpec:
    """待交叉验证的学习器"""
    name: str
    score: ScoreFn


@dataclass
class FoldAudit:
    """一次 (网格点, 折) 评估涉及的下标"""
    grid_index: int
    fold: int
    train_indices: np.ndarray
    val_indices: np.ndarray


@dataclass
class CrossValidationResult:
    """网格搜索结果"""
    best_params: Dict[str, Any]
    best_index: int
    grid: List[Dict[str, Any]]
    fold_scores: np.ndarray  # 网格点 × 折
    folds: int
    seed: int
    audit: List[FoldAudit] = field(default_factory=list, repr=False)

    @property
    def mean_scores(self) -> np.ndarray:
        return self.fold_scores.mean(axis=1)

    @property
    def best_score(self) -> float:
        return float(self.mean_scores[self.best_index])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_params": self.best_params,
            "best_score": self.best_score,
            "folds": self.folds,
            "seed": self.seed,
            "grid_size": len(self.grid),
        }


def expand_grid(grid: Union[Mapping[str, Sequence[Any]], Sequence[Mapping[str, Any]]]) -> List[Dict[str, Any]]:
    """参数网格展开为参数字典列表（按键的给定顺序做笛卡尔积）"""
    if isinstance(grid, Mapping):
        keys = list(grid)
        for key in keys:
            if len(grid[key]) == 0:
                raise InvalidInputError(f"参数网格 {key} 为空")
        return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]
    points = [dict(p) for p in grid]
    if not points:
        raise InvalidInputError("参数网格为空")
    return points


def _selection_key(params: Dict[str, Any], mean: float, index: int):
    regularization = [-float(params[k]) for k in REGULARIZATION_KEYS if k in params]
    gamma = [float(params["gamma"])] if "gamma" in params else []
    return (-mean, *regularization, *gamma, index)


def _check_disjoint(entry: FoldAudit, n: int) -> None:
    overlap = np.intersect1d(entry.train_indices, entry.val_indices)
    if overlap.size:
        raise LeakageError(f"折 {entry.fold}: 验证样本 {overlap[:5].tolist()} 出现在训练折中")
    for idx in (entry.train_indices, entry.val_indices):
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise LeakageError(f"折 {entry.fold}: 下标超出训练集范围 [0, {n})")


def cross_validate(
    spec: LearnerSpec,
    data: Dataset,
    folds: int,
    grid,
    seed: int,
    threads: Optional[int] = None,
) -> CrossValidationResult:
    """
    穷举网格，选平均折准确率最高者

    平局依次偏向：更大的 mu/lam、更小的 gamma、网格中靠前的点。

    Args:
        spec: 学习器
        data: 训练集（只在其内部划分折）
        folds: 折数（≥ 2）
        grid: 参数网格（dict 或参数字典列表）
        seed: 划分种子
        threads: 并行线程数
    """
    points = expand_grid(grid)
    fold_val = stratified_folds(data.labels, folds, seed)
    everything = np.arange(len(data))
    fold_train = [np.setdiff1d(everything, val) for val in fold_val]

    tasks = [(g, f) for g in range(len(points)) for f in range(folds)]
    audit = [FoldAudit(g, f, fold_train[f], fold_val[f]) for g, f in tasks]
    for entry in audit:
        _check_disjoint(entry, len(data))

    log.info(f"交叉验证 {spec.name}: {len(points)} 个网格点 × {folds} 折, n={len(data)}")

    def _evaluate(task):
        g, f = task
        score = float(spec.score(points[g], fold_train[f], fold_val[f]))
        log.debug(f"{spec.name} 网格点 {g} {points[g]} 折 {f}: {score:.4f}")
        return score

    scores = np.array(WorkerPool(threads).map(_evaluate, tasks), dtype=np.float64).reshape(len(points), folds)
    means = scores.mean(axis=1)
    best = min(range(len(points)), key=lambda g: _selection_key(points[g], means[g], g))
    log.info(f"{spec.name} 最优参数 {points[best]}，平均折准确率 {means[best]:.4f}")
    return CrossValidationResult(dict(points[best]), best, points, scores, folds, seed, audit)


def accuracy(predicted: np.ndarray, labels: np.ndarray) -> float:
    """分类准确率（0-1）"""
    predicted = np.asarray(predicted)
    labels = np.asarray(labels)
    if len(labels) == 0:
        return 0.0
    return float(np.mean(predicted == labels))
