"""
距离替换核基线（DSK_RBF / DSK_ND）+ 核岭分类

Gram 矩阵不做半正定修复；某个网格点上 K + λI 奇异时该点记 0 分。

Author: gngdingghuan
"""

from typing import Any, Dict

import numpy as np

from core.dataset import Dataset
from distances.matrix import cross_distances, pairwise_distances
from embedding.kernels import GramConstruction, dsk_cross_kernel, dsk_kernel
from learners.kernel_ridge import predict_kernel, train_kernel
from learners.validation import LearnerSpec, accuracy, cross_validate
from methods.base_method import BaseMethod, FittedMethod, MethodContext
from utils.error_handler import SingularSystemError
from utils.logger import log


class DskMethod(BaseMethod):
    """共用实现，子类给出核类型"""
    construction: GramConstruction = GramConstruction.DSK_RBF
    grid_keys = ("gamma", "lam")

    def _gamma_grid(self, ctx: MethodContext):
        return list(ctx.grids["gamma"])

    def fit(self, ctx: MethodContext) -> FittedMethod:
        train = ctx.train
        D = pairwise_distances(train.objects, ctx.measure, ctx.threads)
        labels = train.labels

        def _score(params: Dict[str, Any], tr: np.ndarray, va: np.ndarray) -> float:
            K = dsk_kernel(self.construction, params["gamma"], D[np.ix_(tr, tr)])
            try:
                model = train_kernel(K, labels[tr], params["lam"], n_classes=train.n_classes)
            except SingularSystemError as e:
                log.warning(f"{self.name} 网格点 {params} 跳过: {e}")
                return 0.0
            K_val = dsk_cross_kernel(self.construction, params["gamma"], D[np.ix_(va, tr)])
            return accuracy(predict_kernel(model, K_val), labels[va])

        grid = {"gamma": self._gamma_grid(ctx), "lam": list(ctx.grids["lam"])}
        cv = cross_validate(LearnerSpec(self.name, _score), train, ctx.folds, grid, ctx.fold_seed, ctx.threads)

        best = cv.best_params
        K = dsk_kernel(self.construction, best["gamma"], D)
        model = train_kernel(K, labels, best["lam"], n_classes=train.n_classes)
        metadata = {"construction": self.construction.value, "condition": model.metadata.get("condition")}
        return FittedMethod(cv, {"model": model, "gamma": best["gamma"]}, metadata=metadata)

    def predict(self, fitted: FittedMethod, ctx: MethodContext, test: Dataset):
        D = cross_distances(test.objects, ctx.train.objects, ctx.measure, ctx.threads)
        K_cross = dsk_cross_kernel(self.construction, fitted.state["gamma"], D)
        return predict_kernel(fitted.state["model"], K_cross)


class DskRbfMethod(DskMethod):
    name = "dsk-rbf"
    description = "K = exp(-γ D²) 的核岭分类"
    construction = GramConstruction.DSK_RBF


class DskNdMethod(DskMethod):
    name = "dsk-nd"
    description = "K = -D² 的核岭分类"
    construction = GramConstruction.DSK_ND
    grid_keys = ("lam",)

    def _gamma_grid(self, ctx: MethodContext):
        # -D² 与 γ 无关
        return [1.0]
