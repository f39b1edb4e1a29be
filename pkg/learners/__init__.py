"""
学习器：线性 ERM、核岭分类、kNN、交叉验证、模型记录
"""

from learners.linear import LinearModel, LossKind, decision_scores, linear_objective, predict_linear, train_linear
from learners.kernel_ridge import KernelModel, one_vs_rest_targets, predict_kernel, train_kernel
from learners.knn import KnnModel, knn_predict, knn_predict_many, vote_from_distances
from learners.validation import (
    CrossValidationResult,
    FoldAudit,
    LearnerSpec,
    accuracy,
    cross_validate,
    expand_grid,
)
from learners.model_io import load_model_record, save_model_record

__all__ = [
    "LinearModel",
    "LossKind",
    "decision_scores",
    "linear_objective",
    "predict_linear",
    "train_linear",
    "KernelModel",
    "one_vs_rest_targets",
    "predict_kernel",
    "train_kernel",
    "KnnModel",
    "knn_predict",
    "knn_predict_many",
    "vote_from_distances",
    "CrossValidationResult",
    "FoldAudit",
    "LearnerSpec",
    "accuracy",
    "cross_validate",
    "expand_grid",
    "load_model_record",
    "save_model_record",
]
