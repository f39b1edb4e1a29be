"""
D2KE 嵌入层：随机特征映射、核矩阵、伪欧氏嵌入、收敛分析

Author: gngdingghuan
"""

from embedding.feature_map import (
    EmbeddingModel,
    embed,
    embed_dataset,
    features_from_distances,
    rf_kernel,
    softmin_distance,
)
from embedding.kernels import (
    GramConstruction,
    GramMatrix,
    dsk_kernel,
    dsk_cross_kernel,
    gram_from_features,
    validate_distance_matrix,
)
from embedding.pseudo_euclidean import EigenTreatment, PseudoEuclideanEmbedding, pseudo_euclidean_embed
from embedding.convergence import ConvergenceReport, kernel_convergence_sweep

__all__ = [
    "EmbeddingModel",
    "embed",
    "embed_dataset",
    "features_from_distances",
    "rf_kernel",
    "softmin_distance",
    "GramConstruction",
    "GramMatrix",
    "dsk_kernel",
    "dsk_cross_kernel",
    "gram_from_features",
    "validate_distance_matrix",
    "EigenTreatment",
    "PseudoEuclideanEmbedding",
    "pseudo_euclidean_embed",
    "ConvergenceReport",
    "kernel_convergence_sweep",
]
