"""
kNN 基线：训练集两两距离矩阵上对 k 做交叉验证

Author: gngdingghuan
"""

from typing import Any, Dict

import numpy as np

from core.dataset import Dataset
from distances.matrix import cross_distances, pairwise_distances
from learners.knn import vote_from_distances
from learners.validation import LearnerSpec, accuracy, cross_validate
from methods.base_method import BaseMethod, FittedMethod, MethodContext


class KnnMethod(BaseMethod):
    name = "knn"
    description = "k 近邻多数投票"
    grid_keys = ("k",)

    def fit(self, ctx: MethodContext) -> FittedMethod:
        train = ctx.train
        D = pairwise_distances(train.objects, ctx.measure, ctx.threads)
        labels = train.labels

        def _score(params: Dict[str, Any], tr: np.ndarray, va: np.ndarray) -> float:
            k = min(int(params["k"]), len(tr))
            predicted = vote_from_distances(D[np.ix_(va, tr)], labels[tr], k, train.n_classes)
            return accuracy(predicted, labels[va])

        grid = {"k": [int(k) for k in ctx.grids["k"]]}
        cv = cross_validate(LearnerSpec(self.name, _score), train, ctx.folds, grid, ctx.fold_seed, ctx.threads)
        k = min(int(cv.best_params["k"]), len(train))
        return FittedMethod(cv, {"k": k}, metadata={"k_used": k})

    def predict(self, fitted: FittedMethod, ctx: MethodContext, test: Dataset):
        D = cross_distances(test.objects, ctx.train.objects, ctx.measure, ctx.threads)
        return vote_from_distances(D, ctx.train.labels, fitted.state["k"], ctx.train.n_classes)
