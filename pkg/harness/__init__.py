"""
实验运行器：配置、泄漏审计、结果表、耗时分析
"""

from harness.audit import LeakageAudit
from harness.experiment import (
    ExperimentConfig,
    load_experiment_config,
    parse_config_text,
    prepare_data,
    run_experiment,
)
from harness.results import ResultFormat, ResultTable, emit_results, parse_results
from harness.timing import ScalingReport, timing_scaling_report

__all__ = [
    "LeakageAudit",
    "ExperimentConfig",
    "load_experiment_config",
    "parse_config_text",
    "prepare_data",
    "run_experiment",
    "ResultFormat",
    "ResultTable",
    "emit_results",
    "parse_results",
    "ScalingReport",
    "timing_scaling_report",
]
