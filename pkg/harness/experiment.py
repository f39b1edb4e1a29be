"""
实验配置与实验运行器

配置文件为扁平的 `key = value` 文本，每行一个键，# 开头为注释；
列表值用逗号分隔。未知键、重复键都是配置错误。

每个种子：生成/读取数据 → 分层划分 → 对每个方法：训练集上交叉验证、
用最优参数在整个训练集上重新训练、在测试集上评估一次。
方法依次运行，各自使用由主种子派生的独立种子流。

Author: gngdingghuan
"""

import time
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import describe_config, get_config
from core.dataset import Dataset, split_dataset, standardize_time_series
from core.formats import load_dataset
from core.objects import ObjectKind
from core.synthetic import SyntheticTask, gen_synthetic
from distances.measures import get_measure, measure_for_kind
from harness.audit import LeakageAudit
from harness.results import ResultTable, plain
from learners.validation import accuracy
from methods import METHODS, MethodContext, MethodResult, get_method
from sampling.sampler import derive_seed
from utils.error_handler import ConfigError, ErrorHandler
from utils.logger import log
from utils.system_info import SystemInfo

# 每个方法使用的网格键
METHOD_GRIDS: Dict[str, Tuple[str, ...]] = {
    "d2ke": ("gamma", "R", "mu", "length_max", "element_std"),
    "rsm": ("gamma", "R", "mu"),
    "knn": ("k",),
    "dsk-rbf": ("gamma", "lam"),
    "dsk-nd": ("lam",),
    "gdk-led": ("rank", "mu"),
}

LIST_FIELDS = ("seed", "methods", "gamma_grid", "R_grid", "mu_grid", "lam_grid", "k_grid",
               "rank_grid", "length_max_grid", "element_std_grid")


def _grid_default(name: str):
    return lambda: list(getattr(get_config().grid, name))


class ExperimentConfig(BaseModel):
    """一次实验的完整配置"""
    model_config = ConfigDict(extra="forbid")

    # 数据：文件或合成任务，二选一
    data: Optional[str] = None
    kind: Optional[str] = None
    train_fraction: float = Field(0.7, gt=0.0, lt=1.0)
    task: Optional[str] = None
    n_train: int = Field(200, ge=2)
    n_test: int = Field(100, ge=1)
    standardize: bool = False

    measure: Optional[str] = None
    methods: List[str]
    seed: List[int] = Field(min_length=1)
    folds: int = Field(default_factory=lambda: get_config().grid.folds, ge=2)

    gamma_grid: List[float] = Field(default_factory=_grid_default("gamma"))
    R_grid: List[int] = Field(default_factory=_grid_default("R"))
    mu_grid: List[float] = Field(default_factory=_grid_default("mu"))
    lam_grid: List[float] = Field(default_factory=_grid_default("lam"))
    k_grid: List[int] = Field(default_factory=_grid_default("k"))
    rank_grid: List[int] = Field(default_factory=_grid_default("gdk_rank"))
    length_max_grid: List[int] = Field(default_factory=list)
    element_std_grid: List[float] = Field(default_factory=list)

    loss: Literal["hinge-squared", "logistic"] = Field(default_factory=lambda: get_config().optimizer.loss)
    eigen_treatment: Literal["clip", "flip", "keep-signed"] = "clip"
    gdk_transductive: bool = False

    output: Optional[str] = None
    format: Literal["tsv", "json"] = "tsv"

    @field_validator(*LIST_FIELDS, mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.replace(";", ",").split(",") if item.strip()]
        if isinstance(value, (int, float)):
            return [value]
        return value

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("methods 不能为空")
        unknown = [m for m in value if m not in METHODS]
        if unknown:
            raise ValueError(f"未知的方法 {unknown}，可选 {list(METHODS)}")
        if len(set(value)) != len(value):
            raise ValueError("methods 有重复项")
        return value

    @field_validator("gamma_grid", "mu_grid", "lam_grid", "element_std_grid")
    @classmethod
    def _positive_reals(cls, value: List[float]) -> List[float]:
        if any(not v > 0 for v in value):
            raise ValueError("网格中的值必须为正")
        return value

    @field_validator("R_grid", "k_grid", "rank_grid", "length_max_grid")
    @classmethod
    def _positive_ints(cls, value: List[int]) -> List[int]:
        if any(v < 1 for v in value):
            raise ValueError("网格中的值必须 ≥ 1")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if (self.data is None) == (self.task is None):
            raise ValueError("data 与 task 必须且只能指定一个")
        if self.task is not None:
            SyntheticTask.parse(self.task)
        if self.measure is not None:
            get_measure(self.measure)
        if self.kind is not None:
            ObjectKind(self.kind)
        for method in self.methods:
            for key in METHOD_GRIDS[method]:
                if key in ("length_max", "element_std"):
                    continue
                if not getattr(self, f"{key}_grid"):
                    raise ValueError(f"{method} 需要非空的 {key}_grid")
        return self

    def grids(self) -> Dict[str, List[Any]]:
        return {
            "gamma": self.gamma_grid,
            "R": self.R_grid,
            "mu": self.mu_grid,
            "lam": self.lam_grid,
            "k": self.k_grid,
            "rank": self.rank_grid,
            "length_max": self.length_max_grid,
            "element_std": self.element_std_grid,
        }


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    """解析 `key = value` 文本"""
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: 需要 `key = value`，实际 {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{number}: 键为空")
        if key in values:
            raise ConfigError(f"{source}:{number}: 重复的键 {key!r}")
        values[key] = value
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                             for err in e.errors())
        raise ConfigError(f"{source}: 配置无效: {problems}") from None


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """读取实验配置文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"无法读取配置文件 {path}: {e}") from None
    return parse_config_text(text, str(path))


def prepare_data(config: ExperimentConfig, seed: int) -> Tuple[Dataset, Dataset, Dict[str, Any]]:
    """按配置得到 (训练集, 测试集, 数据来源信息)"""
    split_seed = derive_seed(seed, "split")
    if config.task is not None:
        data_seed = derive_seed(seed, "data")
        n = config.n_train + config.n_test
        data = gen_synthetic(config.task, n, data_seed)
        train, test = split_dataset(data, config.n_train / n, split_seed)
        info = {"task": SyntheticTask.parse(config.task).value, "data_seed": data_seed}
    else:
        kind = ObjectKind(config.kind) if config.kind else None
        data = load_dataset(config.data, kind=kind)
        train, test = split_dataset(data, config.train_fraction, split_seed)
        info = {"data": config.data, "checksum": data.metadata.get("checksum")}
    info.update({"split_seed": split_seed, "stratified": True, "n_train": len(train), "n_test": len(test)})

    if config.standardize and train.kind is ObjectKind.TIME_SERIES:
        train, (test,), stats = standardize_time_series(train, test)
        info["standardization"] = stats
    return train, test, info


def _run_method(name: str, config: ExperimentConfig, train: Dataset, test: Dataset, measure,
                seed: int, data_info: Dict[str, Any], handler: ErrorHandler,
                threads: Optional[int]) -> MethodResult:
    method = get_method(name, transductive=config.gdk_transductive)
    grids = {key: list(config.grids()[key]) for key in METHOD_GRIDS[name]}
    ctx = MethodContext(
        train=train,
        measure=measure,
        grids=grids,
        folds=config.folds,
        fold_seed=derive_seed(seed, "folds"),
        method_seed=derive_seed(seed, f"method-{name}"),
        threads=threads,
        loss=config.loss,
        eigen_treatment=config.eigen_treatment,
        test=test if method.transductive else None,
    )
    provenance = {
        "measure": measure.name,
        "folds": config.folds,
        "fold_seed": ctx.fold_seed,
        "method_seed": ctx.method_seed,
        "grids": grids,
        "data": data_info,
        "transductive": method.transductive,
    }
    if measure.name == "dtw":
        # DTW 不按路径长度归一化
        provenance["dtw_normalized"] = False

    start = time.perf_counter()
    result: Dict[str, Any] = {}
    with handler.capture(method=name, seed=seed) as outcome:
        problem = method.validate_grids(grids)
        if problem:
            raise ConfigError(problem)
        audit = LeakageAudit(test.objects)
        if method.transductive:
            fitted = method.fit(ctx)
            provenance["audit"] = {"exempt": True}
        else:
            with audit.watch():
                fitted = method.fit(ctx)
            provenance["audit"] = audit.to_dict()
        predicted = method.predict(fitted, ctx, test)
        result = {
            "accuracy": 100.0 * accuracy(predicted, test.labels),
            "params": fitted.cv.best_params,
            "R": fitted.R,
            "cv_score": 100.0 * fitted.cv.best_score,
        }
        provenance.update(fitted.metadata)
    seconds = time.perf_counter() - start

    if outcome["error"] is not None:
        record = outcome["error"]
        message = f"{record.error_type}: {record.error_message}".replace("\t", " ").replace("\n", " ")
        return MethodResult(name, seed, None, seconds, metadata=plain(provenance), error=message)

    log.info(f"{name} (seed={seed}): 准确率 {result['accuracy']:.2f}%，耗时 {seconds:.2f}s，参数 {result['params']}")
    return MethodResult(
        method=name,
        seed=seed,
        accuracy=float(result["accuracy"]),
        seconds=float(seconds),
        params=plain(result["params"]),
        R=None if result["R"] is None else int(result["R"]),
        cv_score=float(result["cv_score"]),
        metadata=plain(provenance),
    )


def _mean_row(name: str, rows: List[MethodResult]) -> MethodResult:
    ok = [row for row in rows if row.success]
    failed = [row.seed for row in rows if not row.success]
    metadata = {"aggregate": "mean", "n_seeds": len(ok), "failed_seeds": failed}
    if not ok:
        return MethodResult(name, None, None, 0.0, metadata=metadata, error="所有种子均失败")
    return MethodResult(
        method=name,
        seed=None,
        accuracy=float(np.mean([row.accuracy for row in ok])),
        seconds=float(np.mean([row.seconds for row in ok])),
        cv_score=float(np.mean([row.cv_score for row in ok])),
        metadata=metadata,
    )


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> ResultTable:
    """
    运行实验，返回结果表（单个方法失败只记录在该行，不影响其他方法）

    Args:
        config: 实验配置
        threads: 工作线程数（不影响结果）
    """
    threads = threads if threads is not None else get_config().parallel.threads
    handler = ErrorHandler()
    rows: List[MethodResult] = []
    per_method: Dict[str, List[MethodResult]] = {name: [] for name in config.methods}

    for seed in config.seed:
        train, test, info = prepare_data(config, seed)
        measure = get_measure(config.measure) if config.measure else measure_for_kind(train.kind)
        log.info(f"实验 seed={seed}: {len(train)} 训练 / {len(test)} 测试，度量 {measure.name}，"
                 f"方法 {config.methods}")
        for name in config.methods:
            row = _run_method(name, config, train, test, measure, seed, info, handler, threads)
            rows.append(row)
            per_method[name].append(row)

    if len(config.seed) > 1:
        rows.extend(_mean_row(name, per_method[name]) for name in config.methods)

    stats = handler.get_error_stats()
    if stats["total_errors"]:
        log.warning(f"实验中有 {stats['total_errors']} 个方法运行失败: {stats['by_type']}")

    environment = SystemInfo(threads).to_dict()
    settings = plain(config.model_dump(exclude={"output", "format"}))
    settings["R_selection"] = "cross-validation on the training split"
    settings["regularization_grid"] = "mu/lam grid stands in for the SVM C parameter"
    settings["defaults"] = describe_config()
    return ResultTable(rows, plain(environment), list(config.seed), environment["version"], settings)
