"""
测试集泄漏审计
在方法的 fit 阶段监听所有距离计算，任何一次涉及测试对象（按对象身份判断）即报错

Author: gngdingghuan
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Sequence

from core.objects import StructuredObject
from distances.matrix import audit_hook
from utils.error_handler import LeakageError


class LeakageAudit:
    """按身份识别被禁止的对象（内容相同但不同实例的训练样本不算泄漏）"""

    def __init__(self, forbidden: Sequence[StructuredObject], label: str = "test"):
        self._forbidden_objects = list(forbidden)
        self._forbidden = {id(obj) for obj in self._forbidden_objects}
        self.label = label
        self.calls = 0
        self.objects_seen = 0
        self.violations: List[Dict[str, Any]] = []

    def __call__(self, operation: str, objects: Sequence[StructuredObject]) -> None:
        self.calls += 1
        self.objects_seen += len(objects)
        hits = sum(1 for obj in objects if id(obj) in self._forbidden)
        if hits:
            self.violations.append({"operation": operation, "hits": hits})
            raise LeakageError(f"{operation} 距离计算涉及 {hits} 个{self.label}对象")

    @contextmanager
    def watch(self) -> Iterator["LeakageAudit"]:
        with audit_hook(self):
            yield self

    def to_dict(self) -> Dict[str, Any]:
        return {"calls": self.calls, "objects_seen": self.objects_seen, "violations": len(self.violations)}
