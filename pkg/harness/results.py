"""
D2KE 结果表
统一管理实验结果的输出与读回（tsv / json），相同的表总是写出相同的字节

Author: gngdingghuan
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config import VERSION
from methods.base_method import MethodResult
from utils.error_handler import DataFormatError, InvalidInputError
from utils.logger import log

MAGIC = "# d2ke-results"
COLUMNS = ("method", "seed", "accuracy", "seconds", "R", "cv_score", "params", "metadata", "error")


class ResultFormat(Enum):
    TSV = "tsv"
    JSON = "json"


def plain(value: Any) -> Any:
    """把 numpy 标量/数组、元组转换为 JSON 原生类型"""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    return value


@dataclass
class ResultTable:
    """每个方法（每个种子）一行 + 环境元数据"""
    rows: List[MethodResult]
    environment: Dict[str, Any] = field(default_factory=dict)
    seeds: List[int] = field(default_factory=list)
    version: str = VERSION
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if row.accuracy is not None and not 0.0 <= row.accuracy <= 100.0:
                raise InvalidInputError(f"{row.method}: 准确率 {row.accuracy} 不在 [0, 100] 内")

    def header(self) -> Dict[str, Any]:
        return plain({"version": self.version, "seeds": self.seeds,
                      "environment": self.environment, "config": self.config})

    def rows_for(self, method: str) -> List[MethodResult]:
        return [row for row in self.rows if row.method == method]

    def mean_row(self, method: str) -> Optional[MethodResult]:
        for row in self.rows_for(method):
            if row.seed is None:
                return row
        return None


def _dump(value: Any) -> str:
    return json.dumps(plain(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_line(row: MethodResult) -> str:
    cells = [
        row.method,
        "mean" if row.seed is None else str(row.seed),
        _cell(row.accuracy),
        _cell(row.seconds),
        _cell(row.R),
        _cell(row.cv_score),
        _dump(row.params),
        _dump(row.metadata),
        "" if row.error is None else row.error.replace("\t", " ").replace("\n", " "),
    ]
    return "\t".join(cells)


def _render_tsv(table: ResultTable) -> str:
    lines = [f"{MAGIC} version={table.version}", f"# header {_dump(table.header())}", "\t".join(COLUMNS)]
    lines.extend(_row_line(row) for row in table.rows)
    return "\n".join(lines) + "\n"


def _render_json(table: ResultTable) -> str:
    payload = {"header": table.header(), "rows": [plain(row.to_dict()) for row in table.rows]}
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_results(table: ResultTable, path: Union[str, Path], format: str = "tsv") -> Path:
    """
    写出结果表

    Args:
        table: 结果表
        path: 输出路径
        format: tsv / json
    """
    fmt = ResultFormat(format)
    text = _render_tsv(table) if fmt is ResultFormat.TSV else _render_json(table)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise DataFormatError(f"无法写出结果: {e}", path=str(path)) from None
    log.info(f"结果已保存: {path}（{len(table.rows)} 行, {fmt.value}）")
    return path


def _optional(text: str, cast):
    return None if text == "" else cast(text)


def _table_from_header(header: Dict[str, Any], rows: List[MethodResult]) -> ResultTable:
    return ResultTable(rows, header.get("environment", {}), list(header.get("seeds", [])),
                       header.get("version", VERSION), header.get("config", {}))


def _parse_tsv(lines: List[str], path: str) -> ResultTable:
    if len(lines) < 3 or not lines[1].startswith("# header "):
        raise DataFormatError("结果文件缺少头部", line_number=2, path=path)
    header = json.loads(lines[1][len("# header "):])
    if tuple(lines[2].split("\t")) != COLUMNS:
        raise DataFormatError("列名不匹配", line_number=3, path=path)
    rows = []
    for number, line in enumerate(lines[3:], start=4):
        cells = line.split("\t")
        if len(cells) != len(COLUMNS):
            raise DataFormatError(f"需要 {len(COLUMNS)} 列，实际 {len(cells)}", line_number=number, path=path)
        method, seed, acc, seconds, R, cv, params, metadata, error = cells
        rows.append(MethodResult(
            method=method,
            seed=None if seed == "mean" else int(seed),
            accuracy=_optional(acc, float),
            seconds=float(seconds),
            params=json.loads(params),
            R=_optional(R, int),
            cv_score=_optional(cv, float),
            metadata=json.loads(metadata),
            error=error or None,
        ))
    return _table_from_header(header, rows)


def parse_results(path: Union[str, Path]) -> ResultTable:
    """读回 emit_results 写出的文件（自动识别格式）"""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.startswith(MAGIC):
        return _parse_tsv(text.rstrip("\n").split("\n"), str(path))
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"无法识别的结果文件: {e.msg}", line_number=e.lineno, path=str(path)) from None
    rows = [MethodResult(**record) for record in payload["rows"]]
    return _table_from_header(payload["header"], rows)
