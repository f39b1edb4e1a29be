"""
对比方法注册表
"""

from typing import Dict, Type

from methods.base_method import BaseMethod, FittedMethod, MethodContext, MethodResult
from methods.d2ke import D2keMethod, RandomFeatureMethod, RsmMethod
from methods.dsk import DskMethod, DskNdMethod, DskRbfMethod
from methods.gdk_led import GdkLedMethod
from methods.knn import KnnMethod
from utils.error_handler import ConfigError

METHODS: Dict[str, Type[BaseMethod]] = {
    D2keMethod.name: D2keMethod,
    KnnMethod.name: KnnMethod,
    DskRbfMethod.name: DskRbfMethod,
    DskNdMethod.name: DskNdMethod,
    GdkLedMethod.name: GdkLedMethod,
    RsmMethod.name: RsmMethod,
}


def get_method(name: str, transductive: bool = False) -> BaseMethod:
    """按名称创建方法实例"""
    if name not in METHODS:
        raise ConfigError(f"未知的方法: {name!r}（可选: {', '.join(METHODS)}）")
    if name == GdkLedMethod.name:
        return GdkLedMethod(transductive=transductive)
    return METHODS[name]()


__all__ = [
    "BaseMethod",
    "FittedMethod",
    "MethodContext",
    "MethodResult",
    "RandomFeatureMethod",
    "D2keMethod",
    "RsmMethod",
    "DskMethod",
    "DskRbfMethod",
    "DskNdMethod",
    "GdkLedMethod",
    "KnnMethod",
    "METHODS",
    "get_method",
]
