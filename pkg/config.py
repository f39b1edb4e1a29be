"""
D2KE 配置管理模块
支持环境变量和 .env 文件

Author: gngdingghuan
"""

import os
import logging
from pathlib import Path
from dataclasses import dataclass, field
from typing import List, Tuple, Dict
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 创建日志器（避免循环导入）
_logger = logging.getLogger("d2ke.config")
if not _logger.handlers:
    handler = logging.StreamHandler()
    formatter = logging.Formatter('%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s - %(message)s')
    handler.setFormatter(formatter)
    _logger.addHandler(handler)
    _logger.setLevel(logging.INFO)


VERSION = "1.0.0"


def _env_int(name: str, default: int) -> int:
    """读取整数环境变量，非法值回退到默认值"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        _logger.warning(f"环境变量 {name}={raw!r} 不是整数，使用默认值 {default}")
        return default


def _log_spaced(low_exp: int, high_exp: int) -> List[float]:
    return [float(10.0 ** e) for e in range(low_exp, high_exp + 1)]


def _doubling(low: int, high: int) -> List[int]:
    values = []
    value = low
    while value <= high:
        values.append(value)
        value *= 2
    return values


@dataclass
class ParallelConfig:
    """并行配置"""
    # 工作线程数（1 表示串行）
    threads: int = field(default_factory=lambda: max(1, _env_int("D2KE_THREADS", os.cpu_count() or 1)))

    # 每个任务块的行数
    chunk_rows: int = 16


@dataclass
class SamplingConfig:
    """随机对象 p(ω) 的默认参数"""
    # 随机时间序列
    ts_length: Tuple[int, int] = (2, 10)
    element_std: float = 1.0
    # 未给出 length_max 网格时，时间序列在这些上界中交叉验证选择
    ts_length_max_grid: List[int] = field(default_factory=lambda: [10, 30, 50])

    # 随机向量集合
    vset_size: Tuple[int, int] = (3, 15)

    # 随机字符串（上界默认取训练集长度中位数）
    string_length_min: int = 2

    # RSM 默认无放回抽样
    holdout_without_replacement: bool = True


@dataclass
class GridConfig:
    """交叉验证的默认参数网格"""
    gamma: List[float] = field(default_factory=lambda: _log_spaced(-5, 3))
    R: List[int] = field(default_factory=lambda: _doubling(4, 4096))
    mu: List[float] = field(default_factory=lambda: _log_spaced(-4, 2))
    lam: List[float] = field(default_factory=lambda: _log_spaced(-4, 2))
    k: List[int] = field(default_factory=lambda: [1, 3, 5, 7, 9])
    gdk_rank: List[int] = field(default_factory=lambda: _doubling(4, 512))
    folds: int = 10


@dataclass
class OptimizerConfig:
    """线性模型优化器配置"""
    loss: str = "hinge-squared"  # hinge-squared, logistic
    tol: float = 1e-6
    max_iter: int = 500


@dataclass
class D2keConfig:
    """D2KE 总配置"""
    parallel: ParallelConfig = field(default_factory=ParallelConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    # 日志配置（log_file 为空时不写文件）
    log_level: str = field(default_factory=lambda: os.getenv("D2KE_LOG_LEVEL", "INFO"))
    log_file: str = field(default_factory=lambda: os.getenv("D2KE_LOG_FILE", ""))

    # 结果输出目录
    results_dir: str = field(default_factory=lambda: os.getenv(
        "D2KE_RESULTS_DIR", str(Path.cwd() / "results")))

    # 单行输入上限（字节）
    max_line_bytes: int = 10 * 1024 * 1024


# 全局配置实例
config = D2keConfig()


def get_config() -> D2keConfig:
    """获取配置实例"""
    return config


def update_config(**kwargs) -> D2keConfig:
    """更新配置（支持 threads 快捷键）"""
    global config
    for key, value in kwargs.items():
        if value is None:
            continue
        if key == "threads":
            config.parallel.threads = max(1, int(value))
        elif hasattr(config, key):
            setattr(config, key, value)
        else:
            _logger.warning(f"忽略未知配置项: {key}")
    return config


def describe_config() -> Dict[str, object]:
    """导出用于结果元数据的配置快照"""
    return {
        "threads": config.parallel.threads,
        "optimizer": {
            "loss": config.optimizer.loss,
            "tol": config.optimizer.tol,
            "max_iter": config.optimizer.max_iter,
        },
        "sampling": {
            "ts_length": list(config.sampling.ts_length),
            "element_std": config.sampling.element_std,
            "ts_length_max_grid": list(config.sampling.ts_length_max_grid),
            "vset_size": list(config.sampling.vset_size),
            "string_length_min": config.sampling.string_length_min,
        },
    }
