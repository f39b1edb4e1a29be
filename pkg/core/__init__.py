"""
D2KE 核心对象层：结构化对象、数据集、文件格式、合成任务

Author: gngdingghuan
"""

from core.objects import ObjectKind, TimeSeries, SymbolString, VectorSet, StructuredObject
from core.dataset import Dataset, split_dataset, stratified_folds, standardize_time_series
from core.formats import FileFormat, load_dataset, write_dataset, read_matrix, write_matrix
from core.synthetic import SyntheticTask, gen_synthetic

__all__ = [
    "ObjectKind",
    "TimeSeries",
    "SymbolString",
    "VectorSet",
    "StructuredObject",
    "Dataset",
    "split_dataset",
    "stratified_folds",
    "standardize_time_series",
    "FileFormat",
    "load_dataset",
    "write_dataset",
    "read_matrix",
    "write_matrix",
    "SyntheticTask",
    "gen_synthetic",
]
