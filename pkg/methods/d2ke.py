"""
D2KE 与 RSM：同一条随机特征流水线，只有 p(ω) 不同
- d2ke: 合成随机对象（长度上界、元素标准差可作为超参数）
- rsm:  从训练集抽取的代表集（DataHoldout），交叉验证时每折只从折内训练部分抽取

每个分布变体只计算一次 n × R_max 距离矩阵，其余 (γ, R) 通过前缀切片得到。

Author: gngdingghuan
"""

from abc import abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import get_config
from core.dataset import Dataset, stratified_folds
from core.objects import ObjectKind
from distances.matrix import cross_distances
from embedding.feature_map import features_from_distances
from learners.linear import predict_linear, train_linear
from learners.validation import LearnerSpec, accuracy, cross_validate
from methods.base_method import BaseMethod, FittedMethod, MethodContext
from sampling.distributions import DataHoldout, OmegaDistribution, default_distribution
from sampling.sampler import OmegaSample, derive_seed, sample_omegas
from utils.logger import log


class RandomFeatureMethod(BaseMethod):
    """随机特征 + 线性 ERM"""

    grid_keys = ("gamma", "R", "mu")

    @abstractmethod
    def distributions(self, ctx: MethodContext) -> List[OmegaDistribution]:
        """p(ω) 的候选变体（交叉验证在其中选择）"""
        pass

    def max_R(self, ctx: MethodContext) -> int:
        return int(max(ctx.grids["R"]))

    def fold_distances(self, ctx: MethodContext, variants: List[OmegaDistribution],
                       R_max: int) -> Optional[Dict[Tuple[int, bytes], np.ndarray]]:
        """交叉验证各折专用的距离矩阵，键为 (变体, 验证折下标的字节串)；None 表示各折共用整体矩阵"""
        return None

    def fit(self, ctx: MethodContext) -> FittedMethod:
        train = ctx.train
        variants = self.distributions(ctx)
        R_max = self.max_R(ctx)
        R_grid = sorted({int(R) for R in ctx.grids["R"] if int(R) <= R_max}) or [R_max]

        samples: List[OmegaSample] = []
        train_distances: List[np.ndarray] = []
        for v, dist in enumerate(variants):
            sample = sample_omegas(dist, R_max, ctx.method_seed, ctx.threads)
            samples.append(sample)
            train_distances.append(cross_distances(train.objects, sample.objects, ctx.measure, ctx.threads))
            log.info(f"{self.name} 变体 {v}: {dist.tag}, n={len(train)}, R_max={R_max}")

        labels = train.labels
        per_fold = self.fold_distances(ctx, variants, R_max)

        def _score(params: Dict[str, Any], tr: np.ndarray, va: np.ndarray) -> float:
            if per_fold is None:
                D = train_distances[params["variant"]][:, :params["R"]]
            else:
                D = per_fold[params["variant"], va.tobytes()][:, :params["R"]]
            features = features_from_distances(D, params["gamma"])
            model = train_linear(features[tr], labels[tr], params["mu"], ctx.loss, n_classes=train.n_classes)
            return accuracy(predict_linear(model, features[va]), labels[va])

        grid = {
            "variant": list(range(len(variants))),
            "gamma": list(ctx.grids["gamma"]),
            "R": R_grid,
            "mu": list(ctx.grids["mu"]),
        }
        cv = cross_validate(LearnerSpec(self.name, _score), train, ctx.folds, grid, ctx.fold_seed, ctx.threads)

        best = cv.best_params
        R = int(best["R"])
        features = features_from_distances(train_distances[best["variant"]][:, :R], best["gamma"])
        model = train_linear(features, labels, best["mu"], ctx.loss, n_classes=train.n_classes)
        omegas = samples[best["variant"]].prefix(R)
        dist = variants[best["variant"]]
        metadata = {
            "distribution": dist.to_dict(),
            "omega_seed": ctx.method_seed,
            "loss": ctx.loss,
            "converged": model.training_log.get("converged"),
            "R_selection": "cross-validation",
        }
        return FittedMethod(cv, {"model": model, "omegas": omegas, "gamma": best["gamma"]}, R, metadata)

    def predict(self, fitted: FittedMethod, ctx: MethodContext, test: Dataset):
        D = cross_distances(test.objects, fitted.state["omegas"].objects, ctx.measure, ctx.threads)
        return predict_linear(fitted.state["model"], features_from_distances(D, fitted.state["gamma"]))


class D2keMethod(RandomFeatureMethod):
    name = "d2ke"
    description = "随机对象特征 exp(-γ d(x, ω)) + 线性分类器"

    def distributions(self, ctx: MethodContext) -> List[OmegaDistribution]:
        lengths = ctx.grids.get("length_max")
        stds = [None]
        if ctx.train.kind is ObjectKind.TIME_SERIES:
            lengths = lengths or list(get_config().sampling.ts_length_max_grid)
            stds = ctx.grids.get("element_std") or [None]
        lengths = lengths or [None]
        return [default_distribution(ctx.train, length_max=L, element_std=s) for L in lengths for s in stds]


class RsmMethod(RandomFeatureMethod):
    name = "rsm"
    description = "代表集方法：ω 取自训练集"

    def distributions(self, ctx: MethodContext) -> List[OmegaDistribution]:
        without = get_config().sampling.holdout_without_replacement
        return [DataHoldout(ctx.train, without_replacement=without)]

    def max_R(self, ctx: MethodContext) -> int:
        R_max = super().max_R(ctx)
        if not get_config().sampling.holdout_without_replacement:
            return R_max
        # 不放回抽样时受最小的折内训练部分限制
        largest_fold = max(len(va) for va in stratified_folds(ctx.train.labels, ctx.folds, ctx.fold_seed))
        limit = len(ctx.train) - largest_fold
        if R_max > limit:
            log.warning(f"rsm: R={R_max} 超过折内训练集大小，截断为 {limit}")
            return limit
        return R_max

    def fold_distances(self, ctx: MethodContext, variants: List[OmegaDistribution],
                       R_max: int) -> Dict[Tuple[int, bytes], np.ndarray]:
        """每折只从该折的训练部分抽取代表集，验证折对象不会成为 ω"""
        everything = np.arange(len(ctx.train))
        table: Dict[Tuple[int, bytes], np.ndarray] = {}
        for f, va in enumerate(stratified_folds(ctx.train.labels, ctx.folds, ctx.fold_seed)):
            part = ctx.train.subset(np.setdiff1d(everything, va))
            for v, dist in enumerate(variants):
                fold_dist = DataHoldout(part, without_replacement=dist.without_replacement)
                sample = sample_omegas(fold_dist, R_max, derive_seed(ctx.method_seed, f"fold-{f}"), ctx.threads)
                table[v, va.tobytes()] = cross_distances(ctx.train.objects, sample.objects, ctx.measure, ctx.threads)
        return table
