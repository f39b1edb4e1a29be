"""
GDK_LED 基线：伪欧氏嵌入坐标 + 线性分类器

默认只用训练集构造嵌入，验证折/测试样本用样本外公式投影；
transductive=True 时在训练+测试的联合距离矩阵上构造嵌入。

Author: gngdingghuan
"""

from typing import Any, Dict

import numpy as np

from core.dataset import Dataset
from distances.matrix import cross_distances, pairwise_distances
from embedding.pseudo_euclidean import pseudo_euclidean_embed
from learners.linear import predict_linear, train_linear
from learners.validation import LearnerSpec, accuracy, cross_validate
from methods.base_method import BaseMethod, FittedMethod, MethodContext
from utils.error_handler import InvalidInputError


class GdkLedMethod(BaseMethod):
    name = "gdk-led"
    description = "伪欧氏线性嵌入 + 线性分类器"
    grid_keys = ("rank", "mu")

    def __init__(self, transductive: bool = False):
        self.transductive = transductive

    def fit(self, ctx: MethodContext) -> FittedMethod:
        if self.transductive:
            return self._fit_transductive(ctx)
        train = ctx.train
        D = pairwise_distances(train.objects, ctx.measure, ctx.threads)
        labels = train.labels

        def _score(params: Dict[str, Any], tr: np.ndarray, va: np.ndarray) -> float:
            r = min(int(params["rank"]), len(tr))
            embedding = pseudo_euclidean_embed(D[np.ix_(tr, tr)], r, ctx.eigen_treatment)
            coords_val = embedding.transform(D[np.ix_(va, tr)])
            model = train_linear(embedding.coordinates, labels[tr], params["mu"], ctx.loss,
                                 n_classes=train.n_classes)
            return accuracy(predict_linear(model, coords_val), labels[va])

        grid = {"rank": [int(r) for r in ctx.grids["rank"]], "mu": list(ctx.grids["mu"])}
        cv = cross_validate(LearnerSpec(self.name, _score), train, ctx.folds, grid, ctx.fold_seed, ctx.threads)

        best = cv.best_params
        r = min(int(best["rank"]), len(train))
        embedding = pseudo_euclidean_embed(D, r, ctx.eigen_treatment)
        model = train_linear(embedding.coordinates, labels, best["mu"], ctx.loss, n_classes=train.n_classes)
        metadata = {"rank_used": r, "eigen_treatment": ctx.eigen_treatment, "transductive": False,
                    "negative_eigenvalues": embedding.centering["n_negative"]}
        return FittedMethod(cv, {"embedding": embedding, "model": model}, metadata=metadata)

    def _fit_transductive(self, ctx: MethodContext) -> FittedMethod:
        if ctx.test is None:
            raise InvalidInputError("直推式 gdk-led 需要测试集")
        train, test = ctx.train, ctx.test
        n = len(train)
        D = pairwise_distances(list(train.objects) + list(test.objects), ctx.measure, ctx.threads)
        labels = train.labels
        embeddings: Dict[int, Any] = {}

        def _coords(rank: int) -> np.ndarray:
            r = min(rank, D.shape[0])
            if r not in embeddings:
                embeddings[r] = pseudo_euclidean_embed(D, r, ctx.eigen_treatment).coordinates
            return embeddings[r]

        # 预先计算，避免并行时重复构造
        for rank in ctx.grids["rank"]:
            _coords(int(rank))

        def _score(params: Dict[str, Any], tr: np.ndarray, va: np.ndarray) -> float:
            coords = _coords(int(params["rank"]))[:n]
            model = train_linear(coords[tr], labels[tr], params["mu"], ctx.loss, n_classes=train.n_classes)
            return accuracy(predict_linear(model, coords[va]), labels[va])

        grid = {"rank": [int(r) for r in ctx.grids["rank"]], "mu": list(ctx.grids["mu"])}
        cv = cross_validate(LearnerSpec(self.name, _score), train, ctx.folds, grid, ctx.fold_seed, ctx.threads)

        best = cv.best_params
        coords = _coords(int(best["rank"]))
        model = train_linear(coords[:n], labels, best["mu"], ctx.loss, n_classes=train.n_classes)
        metadata = {"rank_used": coords.shape[1], "eigen_treatment": ctx.eigen_treatment, "transductive": True}
        return FittedMethod(cv, {"test_coords": coords[n:], "model": model}, metadata=metadata)

    def predict(self, fitted: FittedMethod, ctx: MethodContext, test: Dataset):
        if self.transductive:
            return predict_linear(fitted.state["model"], fitted.state["test_coords"])
        D = cross_distances(test.objects, ctx.train.objects, ctx.measure, ctx.threads)
        return predict_linear(fitted.state["model"], fitted.state["embedding"].transform(D))
