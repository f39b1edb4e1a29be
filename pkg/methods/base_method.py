"""
对比方法基类
定义方法的统一接口：fit 只接触训练集，evaluate 才接触测试集

Author: gngdingghuan
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from core.dataset import Dataset
from distances.measures import BaseMeasure
from learners.validation import CrossValidationResult


@dataclass
class MethodContext:
    """一次方法运行所需的全部输入"""
    train: Dataset
    measure: BaseMeasure
    grids: Dict[str, List[Any]]
    folds: int
    fold_seed: int
    method_seed: int
    threads: Optional[int] = None
    loss: str = "hinge-squared"
    eigen_treatment: str = "clip"
    # 只有直推式方法会在 fit 中用到
    test: Optional[Dataset] = None


@dataclass
class FittedMethod:
    """fit 的产物：交叉验证结果 + 预测所需的状态"""
    cv: CrossValidationResult
    state: Dict[str, Any]
    R: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class MethodResult:
    """方法在测试集上的结果（一行结果表）"""
    method: str
    seed: Optional[int]  # None 表示多种子的平均行
    accuracy: Optional[float]
    seconds: float
    params: Dict[str, Any] = field(default_factory=dict)
    R: Optional[int] = None
    cv_score: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def success(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "seed": self.seed,
            "accuracy": self.accuracy,
            "seconds": self.seconds,
            "params": self.params,
            "R": self.R,
            "cv_score": self.cv_score,
            "metadata": self.metadata,
            "error": self.error,
        }


class BaseMethod(ABC):
    """
    方法基类
    所有对比方法必须继承此类
    """

    # 子类必须定义这些属性
    name: str = "base_method"
    description: str = "基础方法"
    # 需要的参数网格键
    grid_keys: tuple = ()
    # 直推式方法在 fit 阶段会接触测试对象
    transductive: bool = False

    @abstractmethod
    def fit(self, ctx: MethodContext) -> FittedMethod:
        """
        在训练集上交叉验证并用最优参数重新训练

        Args:
            ctx: 方法上下文

        Returns:
            FittedMethod
        """
        pass

    @abstractmethod
    def predict(self, fitted: FittedMethod, ctx: MethodContext, test: Dataset):
        """
        预测测试集类别

        Returns:
            类别下标数组
        """
        pass

    def validate_grids(self, grids: Dict[str, List[Any]]) -> Optional[str]:
        """
        检查所需网格是否齐全

        Returns:
            错误信息，None 表示验证通过
        """
        missing = [k for k in self.grid_keys if not grids.get(k)]
        if missing:
            return f"{self.name} 缺少参数网格: {', '.join(missing)}"
        return None

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "description": self.description, "transductive": self.transductive}

    def __repr__(self) -> str:
        return f"<Method: {self.name}>"
