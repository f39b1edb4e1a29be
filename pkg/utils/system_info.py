"""
D2KE 运行环境信息
为实验结果和模型文件记录可复现所需的环境元数据

Author: gngdingghuan
"""

import platform
import sys
from typing import Dict, Any, Optional

import numpy as np
import scipy

from config import VERSION, get_config
from utils.logger import log


class SystemInfo:
    """系统信息检测器"""

    def __init__(self, threads: Optional[int] = None):
        """初始化并检测系统信息"""
        self._info = self._detect_all(threads)
        log.debug(f"系统检测完成: {self._info['platform']} {self._info['arch']}")

    def _detect_all(self, threads: Optional[int]) -> Dict[str, Any]:
        """检测所有系统信息"""
        return {
            "platform": self._get_platform(),
            "arch": self._get_arch(),
            "python": self._get_python_info(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "threads": threads if threads is not None else get_config().parallel.threads,
            "version": VERSION,
        }

    def _get_platform(self) -> str:
        """获取操作系统平台"""
        system = platform.system()
        if system == "Darwin":
            return "macOS"
        return system or "unknown"

    def _get_arch(self) -> str:
        """获取系统架构"""
        machine = platform.machine()
        if machine == "AMD64":
            return "x86_64"
        elif machine in ["ARM64", "aarch64"]:
            return "ARM64"
        return machine

    def _get_python_info(self) -> str:
        return f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}"

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._info)
