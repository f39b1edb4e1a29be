"""
模型记录的 JSON 读写
记录本身足以重建预测：权重、γ、R、种子、p(ω) 描述、网格来源、运行环境

Author: gngdingghuan
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

from config import VERSION
from utils.error_handler import DataFormatError
from utils.logger import log

RECORD_TYPE = "d2ke-model"
REQUIRED_KEYS = ("model", "gamma", "R", "seed", "measure", "distribution")


def save_model_record(record: Dict[str, Any], path: Union[str, Path]) -> Path:
    """写入模型记录（键排序，输出稳定）"""
    path = Path(path)
    payload = {"type": RECORD_TYPE, "version": VERSION, **record}
    missing = [k for k in REQUIRED_KEYS if k not in payload]
    if missing:
        raise DataFormatError(f"模型记录缺少字段: {missing}", path=str(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    log.info(f"模型已保存: {path}")
    return path


def load_model_record(path: Union[str, Path]) -> Dict[str, Any]:
    """读取并校验模型记录"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"模型文件不是合法 JSON: {e.msg}", line_number=e.lineno, path=str(path)) from None
    if not isinstance(payload, dict) or payload.get("type") != RECORD_TYPE:
        raise DataFormatError("不是 d2ke 模型文件", path=str(path))
    missing = [k for k in REQUIRED_KEYS if k not in payload]
    if missing:
        raise DataFormatError(f"模型记录缺少字段: {missing}", path=str(path))
    if payload.get("version") != VERSION:
        log.warning(f"模型版本 {payload.get('version')} 与当前版本 {VERSION} 不同")
    return payload
