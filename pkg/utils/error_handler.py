"""
D2KE 错误类型与错误记录
统一的异常层次，以及实验运行时的失败记录（单个方法失败不影响其他方法）

Author: gngdingghuan
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional
from dataclasses import dataclass, field
from datetime import datetime

from utils.logger import log


class D2keError(Exception):
    """所有 D2KE 错误的基类"""
    pass


class ConfigError(D2keError):
    """配置错误（CLI 退出码 1）"""
    pass


class InvalidInputError(D2keError, ValueError):
    """参数不满足前置条件"""
    pass


class DataFormatError(D2keError):
    """数据文件格式错误，带行号"""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        prefix = ""
        if path:
            prefix += f"{path}:"
        if line_number is not None:
            prefix += f"line {line_number}: "
        elif prefix:
            prefix += " "
        super().__init__(f"{prefix}{message}")


class DimensionMismatchError(D2keError, ValueError):
    """维度不一致"""
    pass


class EmptyDatasetError(D2keError):
    """空数据集"""
    pass


class KindMismatchError(D2keError, TypeError):
    """对象类型与距离/模型不匹配"""
    pass


class InfeasibleSplitError(D2keError):
    """划分或交叉验证折无法满足要求"""
    pass


class OracleLimitError(D2keError):
    """穷举 oracle 的输入规模超限"""
    pass


class SingularSystemError(D2keError):
    """线性方程组数值奇异"""
    pass


class EigenSolverError(D2keError):
    """特征分解失败"""
    pass


class LeakageError(D2keError):
    """评估时触及了不该触及的样本（测试集或验证折）"""
    pass


@dataclass
class ErrorRecord:
    """错误记录"""
    error_type: str
    error_message: str
    timestamp: str
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_type": self.error_type,
            "error_message": self.error_message,
            "timestamp": self.timestamp,
            "context": self.context,
        }


class ErrorHandler:
    """
    错误处理器
    - 错误记录
    - 按类型统计
    - 捕获上下文（记录后不中断调用方）
    """

    def __init__(self):
        self._error_history: List[ErrorRecord] = []

    def record_error(self, exception: BaseException, context: Optional[Dict[str, Any]] = None) -> ErrorRecord:
        """记录错误"""
        record = ErrorRecord(
            error_type=type(exception).__name__,
            error_message=str(exception),
            timestamp=datetime.now().isoformat(),
            context=dict(context or {}),
        )
        self._error_history.append(record)
        log.error(f"错误已记录: {record.error_type} - {record.error_message} {record.context}")
        return record

    @contextmanager
    def capture(self, **context) -> Iterator[Dict[str, Any]]:
        """
        捕获代码块内的 D2keError / 运行时错误并记录

        用法:
            with handler.capture(method="knn") as outcome:
                ...
            if outcome["error"]: ...
        """
        outcome: Dict[str, Any] = {"error": None}
        try:
            yield outcome
        except (D2keError, ArithmeticError, ValueError, RuntimeError, MemoryError) as e:
            outcome["error"] = self.record_error(e, context)

    def get_error_stats(self) -> Dict[str, Any]:
        """获取错误统计"""
        by_type: Dict[str, int] = {}
        for record in self._error_history:
            by_type[record.error_type] = by_type.get(record.error_type, 0) + 1
        return {
            "total_errors": len(self._error_history),
            "by_type": by_type,
        }
