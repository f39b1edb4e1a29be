"""
数据文件读写
- 时间序列 (.ts.tsv):   <label> <T> <V> v11 v12 ... vTV
- 符号串   (.str.txt):  首行 #alphabet abcd，随后每行 <label> <symbols>
- 向量集合 (.vset.jsonl): {"label": int, "elements": [[...], ...]}
- 稠密矩阵:             首行 "n R"，随后每行 R 个 17 位有效数字

以 # 开头的行是指令行（#alphabet、#omega 等），写入 metadata["directives"]。

Author: gngdingghuan
"""

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from config import get_config
from core.dataset import Dataset
from core.objects import ObjectKind, StructuredObject, SymbolString, TimeSeries, VectorSet
from utils.error_handler import (
    DataFormatError,
    DimensionMismatchError,
    EmptyDatasetError,
    InvalidInputError,
)
from utils.logger import log


class FileFormat(Enum):
    """数据文件格式"""
    TIME_SERIES = "ts.tsv"
    STRING = "str.txt"
    VECTOR_SET = "vset.jsonl"


FORMAT_KIND = {
    FileFormat.TIME_SERIES: ObjectKind.TIME_SERIES,
    FileFormat.STRING: ObjectKind.STRING,
    FileFormat.VECTOR_SET: ObjectKind.VECTOR_SET,
}
KIND_FORMAT = {kind: fmt for fmt, kind in FORMAT_KIND.items()}

DEFAULT_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"

PathLike = Union[str, Path]


def infer_format(path: PathLike) -> FileFormat:
    """根据文件后缀推断格式"""
    name = Path(path).name
    for fmt in FileFormat:
        if name.endswith("." + fmt.value):
            return fmt
    raise DataFormatError(f"无法从文件名推断格式（支持 .ts.tsv / .str.txt / .vset.jsonl）", path=str(path))


def file_checksum(path: PathLike) -> str:
    """文件内容的 sha256"""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _iter_lines(path: PathLike) -> Iterator[Tuple[int, str]]:
    """逐行读取（1 起始行号），拒绝超长行"""
    limit = get_config().max_line_bytes
    with open(path, "rb") as f:
        for number, raw in enumerate(f, start=1):
            if len(raw) > limit:
                raise DataFormatError(f"行长度 {len(raw)} 字节超过上限 {limit}", number, str(path))
            try:
                yield number, raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError:
                raise DataFormatError("不是合法的 UTF-8 文本", number, str(path)) from None


def _sort_label_tokens(tokens: List[str]) -> List[str]:
    try:
        return sorted(set(tokens), key=lambda t: int(t))
    except ValueError:
        return sorted(set(tokens))


def _parse_directive(line: str) -> Tuple[str, str]:
    body = line[1:].strip()
    key, _, value = body.partition(" ")
    return key, value.strip()


def _parse_time_series(number: int, line: str, path: str) -> Tuple[str, StructuredObject]:
    tokens = line.split()
    if len(tokens) < 3:
        raise DataFormatError("需要 <label> <T> <V> 以及 T*V 个数值", number, path)
    label = tokens[0]
    try:
        length, n_vars = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise DataFormatError(f"T/V 必须是整数: {tokens[1]!r} {tokens[2]!r}", number, path) from None
    if length < 1 or n_vars < 1:
        raise DataFormatError(f"T 和 V 必须 ≥ 1，实际 T={length} V={n_vars}", number, path)
    values = tokens[3:]
    if len(values) != length * n_vars:
        raise DataFormatError(f"需要 {length * n_vars} 个数值，实际 {len(values)}", number, path)
    try:
        matrix = np.array([float(v) for v in values], dtype=np.float64).reshape(length, n_vars)
    except ValueError as e:
        raise DataFormatError(f"数值解析失败: {e}", number, path) from None
    if not np.all(np.isfinite(matrix)):
        raise DataFormatError("含有非有限数值", number, path)
    return label, StructuredObject(TimeSeries(matrix))


def _parse_string(number: int, line: str, alphabet: str, path: str) -> Tuple[str, StructuredObject]:
    tokens = line.split()
    if not tokens or len(tokens) > 2:
        raise DataFormatError("需要 <label> <symbols>", number, path)
    text = tokens[1] if len(tokens) == 2 else ""
    try:
        return tokens[0], StructuredObject(SymbolString.from_text(text, alphabet))
    except InvalidInputError as e:
        raise DataFormatError(str(e), number, path) from None


def _parse_vector_set(number: int, line: str, path: str) -> Tuple[str, StructuredObject]:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"JSON 解析失败: {e.msg}", number, path) from None
    if not isinstance(record, dict) or "label" not in record or "elements" not in record:
        raise DataFormatError('需要 {"label": int, "elements": [[...], ...]}', number, path)
    elements = record["elements"]
    if not isinstance(elements, list) or not elements:
        raise DataFormatError("elements 必须是非空列表", number, path)
    dims = {len(e) if isinstance(e, list) else -1 for e in elements}
    if -1 in dims:
        raise DataFormatError("每个元素必须是数值列表", number, path)
    if len(dims) != 1:
        raise DimensionMismatchError(f"{path}:line {number}: 集合内向量维度不一致 {sorted(dims)}")
    try:
        obj = StructuredObject(VectorSet(np.array(elements, dtype=np.float64)))
    except (InvalidInputError, ValueError, TypeError) as e:
        raise DataFormatError(str(e), number, path) from None
    return str(record["label"]), obj


def load_dataset(path: PathLike, kind: Optional[ObjectKind] = None, format: Optional[FileFormat] = None) -> Dataset:
    """
    读取数据文件并校验

    Args:
        path: 文件路径
        kind: 期望的对象类型（None 表示由格式决定）
        format: 文件格式（None 表示按后缀推断）

    Returns:
        Dataset，标签被重映射为 0 起始的连续下标，映射写入 metadata["label_mapping"]
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError("文件不存在", path=str(path))
    fmt = format or infer_format(path)
    fmt_kind = FORMAT_KIND[fmt]
    if kind is not None and kind is not fmt_kind:
        raise DataFormatError(f"格式 {fmt.value} 对应 {fmt_kind.value}，与声明的 {kind.value} 不符", path=str(path))

    directives: Dict[str, str] = {}
    tokens: List[str] = []
    objects: List[StructuredObject] = []
    shape_seen: Optional[Tuple[int, int]] = None  # (首次出现的行号, 维度)

    for number, line in _iter_lines(path):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, value = _parse_directive(line)
            directives[key] = value
            continue

        if fmt is FileFormat.TIME_SERIES:
            label, obj = _parse_time_series(number, line, str(path))
            dim = obj.value.n_vars
        elif fmt is FileFormat.STRING:
            alphabet = directives.get("alphabet")
            if not alphabet:
                raise DataFormatError("字符串文件需要在数据之前声明 #alphabet", number, str(path))
            label, obj = _parse_string(number, line, alphabet, str(path))
            dim = None
        else:
            label, obj = _parse_vector_set(number, line, str(path))
            dim = obj.value.dim

        if dim is not None:
            if shape_seen is None:
                shape_seen = (number, dim)
            elif shape_seen[1] != dim:
                raise DimensionMismatchError(
                    f"{path}:line {number}: 维度 {dim} 与第 {shape_seen[0]} 行的维度 {shape_seen[1]} 不一致"
                )
        tokens.append(label)
        objects.append(obj)

    if not objects:
        raise EmptyDatasetError(f"{path}: 文件不包含任何样本")

    ordered = _sort_label_tokens(tokens)
    mapping = {token: i for i, token in enumerate(ordered)}
    labels = np.array([mapping[t] for t in tokens], dtype=np.int64)

    metadata: Dict[str, Any] = {
        "source_path": str(path),
        "checksum": file_checksum(path),
        "format": fmt.value,
        "label_mapping": mapping,
        "directives": directives,
    }
    if "alphabet" in directives:
        metadata["alphabet"] = directives["alphabet"]

    data = Dataset(tuple(objects), labels, "full", metadata)
    log.info(f"已加载数据集 {path.name}: {len(data)} 个 {fmt_kind.value} 样本, {data.n_classes} 个类别")
    return data


def dataset_alphabet(data: Dataset) -> str:
    """字符串数据集的字母表（元数据中没有时按 alphabet_size 生成）"""
    alphabet = data.metadata.get("alphabet")
    if alphabet:
        return alphabet
    size = data.objects[0].value.alphabet_size if data.objects else 1
    if size > len(DEFAULT_ALPHABET):
        raise InvalidInputError(f"alphabet_size={size} 超出默认字母表长度 {len(DEFAULT_ALPHABET)}")
    return DEFAULT_ALPHABET[:size]


def format_object_line(obj: StructuredObject, label: int, alphabet: Optional[str] = None) -> str:
    """把单个对象编码成一行"""
    value = obj.value
    if isinstance(value, TimeSeries):
        numbers = " ".join(repr(float(v)) for v in value.values.reshape(-1))
        return f"{label} {value.length} {value.n_vars} {numbers}"
    if isinstance(value, SymbolString):
        text = value.to_text(alphabet or DEFAULT_ALPHABET[: value.alphabet_size])
        return f"{label} {text}" if text else f"{label}"
    return json.dumps({"label": int(label), "elements": value.elements.tolist()})


def write_dataset(data: Dataset, path: PathLike, directives: Optional[Dict[str, str]] = None) -> Path:
    """
    按规范格式写出数据集（标签写成当前的 0 起始下标）
    """
    if len(data) == 0:
        raise EmptyDatasetError("无法写出空数据集")
    path = Path(path)
    fmt = KIND_FORMAT[data.kind]
    lines: List[str] = []
    for key, value in (directives or {}).items():
        if key == "alphabet":
            continue
        lines.append(f"#{key} {value}")
    alphabet = None
    if fmt is FileFormat.STRING:
        alphabet = dataset_alphabet(data)
        lines.append(f"#alphabet {alphabet}")
    for obj, label in zip(data.objects, data.labels.tolist()):
        lines.append(format_object_line(obj, label, alphabet))

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.debug(f"数据集已写出: {path} ({len(data)} 行)")
    return path


def write_matrix(matrix: np.ndarray, path: PathLike) -> Path:
    """稠密矩阵文本格式：首行 'n R'，随后每行 17 位有效数字"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    n, r = matrix.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{n} {r}\n")
        for row in matrix:
            f.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    return path


def read_matrix(path: PathLike) -> np.ndarray:
    """读取 write_matrix 写出的矩阵"""
    rows: List[List[float]] = []
    header: Optional[Tuple[int, int]] = None
    for number, line in _iter_lines(path):
        if not line.strip():
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2:
                raise DataFormatError("矩阵文件首行需要 'n R'", number, str(path))
            header = (int(parts[0]), int(parts[1]))
            continue
        try:
            row = [float(v) for v in line.split()]
        except ValueError as e:
            raise DataFormatError(f"数值解析失败: {e}", number, str(path)) from None
        if len(row) != header[1]:
            raise DataFormatError(f"需要 {header[1]} 列，实际 {len(row)}", number, str(path))
        rows.append(row)
    if header is None:
        raise EmptyDatasetError(f"{path}: 空矩阵文件")
    if len(rows) != header[0]:
        raise DataFormatError(f"需要 {header[0]} 行，实际 {len(rows)}", path=str(path))
    return np.array(rows, dtype=np.float64).reshape(header)
