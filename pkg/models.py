"""
Модуль моделей данных для SpectralIndep

Содержит классы, описывающие спектры, инерцию, отчёты о границах,
сертификаты и отчёты о запусках, а также иерархию исключений приложения.
"""

from fractions import Fraction
from typing import List, Dict, Optional, Any

from pydantic import BaseModel, Field, field_validator, model_validator

# Режимы классификации нулевых собственных значений
ZERO_EXACT = "exact"  # Точная рациональная арифметика (LDL с симметричным выбором ведущего элемента)
ZERO_TOLERANCE = "tolerance"  # Численный спектр + относительный порог

SCHEMA_VERSION = 1


# Исключения

class SpectralIndepError (Exception):
    """Базовое исключение приложения; exit_code используется CLI"""
    exit_code = 2

    def to_dict(self) -> Dict[str, Any]:
        """Сериализует ошибку для отчёта о запуске"""
        return {"type": type (self).__name__, "message": str (self), "exit_code": self.exit_code}


class InputError (SpectralIndepError):
    """Ошибка входных данных"""


class GraphParseError (InputError):
    """Ошибка разбора graph6 или JSON списка рёбер"""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (смещение {offset})"
        super ().__init__ (message)


class CatalogError (InputError):
    """Неизвестное семейство каталога или недопустимые параметры"""


class ConfigError (InputError):
    """Ошибка конфигурации"""


class CertificateFormatError (InputError):
    """Сертификат не соответствует схеме (индексация, размерности)"""


class ContractViolationError (SpectralIndepError):
    """Нарушено предусловие операции"""


class InertiaModeError (SpectralIndepError):
    """Точный режим применён к нерациональной матрице"""


class RegularityError (SpectralIndepError):
    """Граница Хоффмана требует регулярного графа"""


class DegenerateGraphError (SpectralIndepError):
    """Граф без рёбер там, где граница не определена"""


class WeightPatternError (SpectralIndepError):
    """Носитель весовой матрицы выходит за множество рёбер"""


class ProjectorError (SpectralIndepError):
    """Матрица не является ортогональным проектором"""
    exit_code = 1

    def __init__(self, message: str, residuals: Optional[Dict[str, float]] = None):
        self.residuals = residuals or {}
        super ().__init__ (message)


class BudgetExceededError (SpectralIndepError):
    """Точный оракул не может уложиться в бюджет; ответ не выдаётся"""
    exit_code = 3


class AssertionFailure (SpectralIndepError):
    """Сканирование обнаружило нарушение границы"""
    exit_code = 1


# Спектральные модели

class ZeroPolicy (BaseModel):
    """
    Политика классификации нулевых собственных значений
    """
    mode: str = Field (ZERO_TOLERANCE, description="exact или tolerance")
    epsilon: float = Field (1e-9, description="Относительный порог для режима tolerance")

    @field_validator ('mode')
    @classmethod
    def _check_mode(cls, value: str) -> str:
        if value not in (ZERO_EXACT, ZERO_TOLERANCE):
            raise ValueError (f"Неизвестный режим: {value}")
        return value

    @field_validator ('epsilon')
    @classmethod
    def _check_epsilon(cls, value: float) -> float:
        if not value > 0:
            raise ValueError ("epsilon должен быть положительным")
        return value

    @classmethod
    def exact(cls) -> 'ZeroPolicy':
        return cls (mode=ZERO_EXACT)

    @classmethod
    def tolerance(cls, epsilon: float = 1e-9) -> 'ZeroPolicy':
        return cls (mode=ZERO_TOLERANCE, epsilon=epsilon)


class Spectrum (BaseModel):
    """
    Собственные значения, отсортированные по убыванию
    """
    eigenvalues: List[float] = []

    @property
    def n(self) -> int:
        return len (self.eigenvalues)

    @property
    def largest(self) -> float:
        return self.eigenvalues[0]

    @property
    def smallest(self) -> float:
        return self.eigenvalues[-1]

    def multiplicities(self, tol: float = 1e-7) -> Dict[float, int]:
        """Группирует близкие собственные значения: значение -> кратность"""
        result: Dict[float, int] = {}
        for value in self.eigenvalues:
            key = next ((k for k in result if abs (k - value) < tol), None)
            if key is None:
                result[value] = 1
            else:
                result[key] += 1
        return result


class Inertia (BaseModel):
    """Тройка (n+, n0, n-)"""
    n_plus: int = 0
    n_zero: int = 0
    n_minus: int = 0

    @property
    def n(self) -> int:
        return self.n_plus + self.n_zero + self.n_minus

    def as_tuple(self) -> tuple:
        return self.n_plus, self.n_zero, self.n_minus

    def bound(self) -> int:
        """n0 + min(n+, n-)"""
        return self.n_zero + min (self.n_plus, self.n_minus)


class WalkExtrema (BaseModel):
    """Минимальный и максимальный диагональный элемент p(A)"""
    w: float
    W: float

    @model_validator (mode='after')
    def _check_order(self) -> 'WalkExtrema':
        if self.w > self.W:
            raise ValueError ("w должно быть не больше W")
        return self


class BoundCounts (BaseModel):
    """Две счётные величины полиномиальной границы"""
    ge_w: int
    le_W: int


class BoundReport (BaseModel):
    """
    Отчёт об одной верхней границе для пары (граф, k)
    """
    graph: str = ""
    k: int = 1
    bound: str
    value: float
    floor: int
    counts: Optional[BoundCounts] = None
    tight: Optional[bool] = None
    witness: Dict[str, Any] = {}

    @model_validator (mode='after')
    def _check_value(self) -> 'BoundReport':
        if self.value < 0:
            raise ValueError ("Значение границы не может быть отрицательным")
        return self

    def to_json(self) -> Dict[str, Any]:
        """Сериализация по схеме BoundReport"""
        data = {
            "graph": self.graph,
            "k": self.k,
            "bound": self.bound,
            "value": self.value,
            "floor": self.floor,
            "counts": self.counts.model_dump () if self.counts else None,
            "tight": self.tight,
        }
        if self.witness:
            data["witness"] = self.witness
        return data


# Сертификаты и отчёты о проверке

class IndependentSetCert (BaseModel):
    """Множество вершин на попарном расстоянии больше k"""
    vertices: List[int] = []
    k: int = 1

    def to_json(self) -> Dict[str, Any]:
        return {"k": self.k, "vertices": list (self.vertices)}


class Violation (BaseModel):
    """Нарушенное условие сертификата"""
    condition: str
    indices: List[Any] = []
    residual: float = 0.0


class VerificationReport (BaseModel):
    """
    Результат проверки сертификата; valid истинно тогда и только тогда,
    когда список нарушений пуст
    """
    violations: List[Violation] = []
    value: Optional[Fraction] = None

    model_config = {"arbitrary_types_allowed": True}

    @property
    def valid(self) -> bool:
        return not self.violations

    def conditions(self) -> List[str]:
        return sorted ({v.condition for v in self.violations})

    def to_json(self) -> Dict[str, Any]:
        value = None
        if self.value is not None:
            value = {"numerator": self.value.numerator, "denominator": self.value.denominator}
        return {
            "valid": self.valid,
            "violations": [v.model_dump () for v in self.violations],
            "value": value,
        }


class SearchResult (BaseModel):
    """
    Результат поиска весовой матрицы, минимизирующей инерционную границу
    """
    best_bound: int
    target: int
    tight: bool
    iterations: int
    seed: int
    field: str
    restart_found: Optional[int] = None
    exact_verified: bool = False
    visited: int = 0
    restart_bounds: List[int] = []
    best_weights: Any = None

    model_config = {"arbitrary_types_allowed": True}

    @model_validator (mode='after')
    def _check_soundness(self) -> 'SearchResult':
        if self.best_bound < self.target:
            raise ValueError ("Граница ниже точного значения: нарушение корректности")
        return self


# Отчёт о запуске CLI

class GraphRun (BaseModel):
    """Результаты одного графа в отчёте о запуске"""
    graph: str
    n: int = 0
    m: int = 0
    k: Optional[int] = None
    bounds: List[Dict[str, Any]] = []
    exact: Optional[int] = None
    certificate: Optional[Dict[str, Any]] = None
    verification: Optional[Dict[str, Any]] = None
    search: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, Any]] = None
    timing: Optional[float] = None


class RunReport (BaseModel):
    """
    Отчёт о запуске команды CLI
    """
    schema_version: int = SCHEMA_VERSION
    tool_version: str = ""
    command: str = ""
    input: str = ""
    graphs: List[GraphRun] = []
    summary: Dict[str, Any] = {}

    def failed(self) -> bool:
        return any (g.error is not None for g in self.graphs)
