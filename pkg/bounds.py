"""
Модуль спектральных границ для SpectralIndep

Полиномиальная граница для k-независимости, инерционная граница
(в том числе для эрмитовых взвешиваний H∘A), граница Хоффмана
и граница ван Дама–Хемерса, а также сводка всех применимых границ.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Dict, Optional, Any, Tuple, Union

import numpy as np

from models import (
    BoundReport, BoundCounts, WalkExtrema, ZeroPolicy,
    ContractViolationError, RegularityError, DegenerateGraphError, BudgetExceededError
)
from graph_core import Graph, adjacency_matrix, degrees, is_regular, power_graph
from spectra import eigenvalues_hermitian, inertia, laplacian
from exact_oracle import alpha_k_exact, DEFAULT_BUDGET
from utils import get_logger

logger = get_logger ('bounds')

GRID_RANGE = range (-3, 4)
FLOOR_GUARD = 1e-9  # Защита floor от ошибок округления вида 3.9999999999

Coefficient = Union[int, Fraction, float]


@dataclass (frozen=True)
class Polynomial:
    """
    Многочлен c0 + c1 x + ... + ck x^k (коэффициенты по возрастанию степени)
    """
    coefficients: Tuple[Coefficient, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ContractViolationError ("Многочлен должен иметь хотя бы один коэффициент")
        normalized = tuple (_normalize_coefficient (c) for c in self.coefficients)
        object.__setattr__ (self, 'coefficients', normalized)

    @classmethod
    def parse(cls, text: str) -> 'Polynomial':
        """Разбирает строку 'c0,c1,...,ck'; допускаются дроби '1/2' и десятичные '0.5'"""
        parts = [p.strip () for p in text.split (',')]
        if not parts or any (p == '' for p in parts):
            raise ContractViolationError (f"Некорректная запись многочлена: {text!r}")
        try:
            return cls (tuple (Fraction (p) for p in parts))
        except ValueError as e:
            raise ContractViolationError (f"Некорректный коэффициент в {text!r}") from e

    @classmethod
    def monomial(cls, k: int) -> 'Polynomial':
        """x^k"""
        return cls (tuple ([0] * k + [1]))

    @property
    def degree(self) -> int:
        """Степень; -1 для нулевого многочлена"""
        for i in range (len (self.coefficients) - 1, -1, -1):
            if self.coefficients[i] != 0:
                return i
        return -1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    @property
    def is_rational(self) -> bool:
        return all (isinstance (c, (int, Fraction)) for c in self.coefficients)

    def evaluate(self, x: float) -> float:
        """Схема Горнера"""
        result = 0.0
        for c in reversed (self.coefficients):
            result = result * x + float (c)
        return result

    def evaluate_matrix(self, m: np.ndarray) -> np.ndarray:
        """p(M) в плавающей арифметике (вещественной или комплексной)"""
        m = np.asarray (m)
        dtype = complex if np.iscomplexobj (m) else float
        identity = np.eye (m.shape[0], dtype=dtype)
        result = np.zeros_like (identity)
        for c in reversed (self.coefficients):
            result = result @ m + float (c) * identity
        return result

    def evaluate_matrix_exact(self, a: np.ndarray) -> np.ndarray:
        """
        p(A) точно для целочисленной A и рациональных коэффициентов

        Returns:
            np.ndarray: object-массив int/Fraction
        """
        if not self.is_rational:
            raise ContractViolationError ("Точное вычисление требует рациональных коэффициентов")
        a = np.asarray (a, dtype=object)
        n = a.shape[0]
        identity = np.zeros ((n, n), dtype=object)
        for i in range (n):
            identity[i, i] = 1
        result = np.zeros ((n, n), dtype=object)
        for c in reversed (self.coefficients):
            result = result.dot (a) + identity * c
        return result

    def label(self) -> str:
        """Человекочитаемая запись, например 'x^2+x'"""
        terms = []
        for power in range (len (self.coefficients) - 1, -1, -1):
            c = self.coefficients[power]
            if c == 0:
                continue
            var = '' if power == 0 else ('x' if power == 1 else f'x^{power}')
            if var and c == 1:
                coef = ''
            elif var and c == -1:
                coef = '-'
            else:
                coef = str (c)
            terms.append (f"{coef}{var}")
        return '+'.join (terms).replace ('+-', '-') if terms else '0'

    def to_json(self) -> List[Any]:
        return [c if isinstance (c, int) else str (c) for c in self.coefficients]


def _normalize_coefficient(c: Any) -> Coefficient:
    if isinstance (c, bool):
        raise ContractViolationError ("Коэффициент не может быть логическим значением")
    if isinstance (c, (int, np.integer)):
        return int (c)
    if isinstance (c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance (c, (float, np.floating)):
        if not np.isfinite (c):
            raise ContractViolationError (f"Нечисловой коэффициент {c}")
        return float (c)
    raise ContractViolationError (f"Недопустимый коэффициент {c!r}")


# Полиномиальная граница
def walk_extrema(g: Graph, p: Polynomial) -> WalkExtrema:
    """
    Минимум w и максимум W диагонали p(A); для p = x^k - число замкнутых блужданий длины k

    Args:
        g: граф
        p: многочлен

    Returns:
        WalkExtrema: (w, W)
    """
    a = adjacency_matrix (g)
    if p.is_rational:
        diagonal = np.diagonal (p.evaluate_matrix_exact (a))
    else:
        diagonal = np.diagonal (p.evaluate_matrix (a.astype (float)))
    return WalkExtrema (w=float (min (diagonal)), W=float (max (diagonal)))


def poly_spectral_bound(g: Graph, p: Polynomial, policy: Optional[ZeroPolicy] = None,
                        graph_id: str = "", k: Optional[int] = None) -> BoundReport:
    """
    min(#{i : p(l_i) >= w}, #{i : p(l_i) <= W}) по спектру матрицы смежности

    Сравнения включительны с допуском tau = eps * max(1, max |p(l_i)|).

    Args:
        g: граф
        p: ненулевой многочлен
        policy: политика нулей (берётся epsilon)
        graph_id: идентификатор графа для отчёта
        k: параметр расстояния для отчёта (по умолчанию степень p)

    Returns:
        BoundReport: целочисленная граница с обоими счётчиками
    """
    if p.is_zero:
        raise ContractViolationError ("Нулевой многочлен не задаёт границу")
    policy = policy or ZeroPolicy ()

    extrema = walk_extrema (g, p)
    spectrum = eigenvalues_hermitian (adjacency_matrix (g))
    values = [p.evaluate (x) for x in spectrum.eigenvalues]
    tau = policy.epsilon * max (1.0, max (abs (v) for v in values))

    ge_w = sum (1 for v in values if v >= extrema.w - tau)
    le_W = sum (1 for v in values if v <= extrema.W + tau)
    value = min (ge_w, le_W)
    binding = 'both' if ge_w == le_W else ('ge_w' if ge_w < le_W else 'le_W')

    return BoundReport (
        graph=graph_id,
        k=k if k is not None else max (1, p.degree),
        bound='polynomial',
        value=value,
        floor=value,
        counts=BoundCounts (ge_w=ge_w, le_W=le_W),
        witness={
            "polynomial": p.label (),
            "coefficients": p.to_json (),
            "w": extrema.w,
            "W": extrema.W,
            "binding": binding,
        },
    )


def best_grid_polynomial(g: Graph, k: int, policy: Optional[ZeroPolicy] = None,
                         graph_id: str = "") -> Tuple[Polynomial, BoundReport]:
    """
    Перебор p(x) = x^k + c x, c in {-3..3}; возвращает многочлен с наименьшей границей
    """
    best = None
    for c in sorted (GRID_RANGE, key=lambda x: (abs (x), x)):
        coefficients = [0] * (k + 1)
        coefficients[k] += 1
        coefficients[1] += c
        p = Polynomial (tuple (coefficients))
        if p.is_zero:
            continue
        report = poly_spectral_bound (g, p, policy, graph_id, k)
        if best is None or report.value < best[1].value:
            best = (p, report)
    best[1].witness["grid"] = True
    return best


# Инерционная граница
def inertia_bound(m: Any, policy: Optional[ZeroPolicy] = None, graph_id: str = "",
                  k: int = 1, name: str = 'inertia') -> BoundReport:
    """
    n0 + min(n+, n-) для матрицы смежности или эрмитова взвешивания H∘A

    Args:
        m: эрмитова матрица с нулевой диагональю
        policy: политика нулей; None - точный режим для целочисленных матриц
        graph_id: идентификатор графа для отчёта
        k: параметр расстояния для отчёта
        name: имя границы в отчёте

    Returns:
        BoundReport: граница и инерция в witness
    """
    result = inertia (m, policy)
    value = result.bound ()
    return BoundReport (
        graph=graph_id,
        k=k,
        bound=name,
        value=value,
        floor=value,
        counts=BoundCounts (ge_w=result.n_plus + result.n_zero, le_W=result.n_minus + result.n_zero),
        witness={"inertia": list (result.as_tuple ()), "mode": (policy.mode if policy else 'default')},
    )


def graph_inertia_bound(g: Graph, policy: Optional[ZeroPolicy] = None, graph_id: str = "",
                        k: int = 1) -> BoundReport:
    """Инерционная граница невзвешенной матрицы смежности"""
    return inertia_bound (adjacency_matrix (g), policy, graph_id, k)


# Границы Хоффмана и ван Дама–Хемерса
def hoffman_ratio(n: int, delta: float, lambda_min: float) -> float:
    """n |l_n| / (delta + |l_n|)"""
    return n * abs (lambda_min) / (delta + abs (lambda_min))


def safe_floor(value: float) -> int:
    return int (math.floor (value + FLOOR_GUARD * max (1.0, abs (value))))


def hoffman_bound(g: Graph, graph_id: str = "") -> BoundReport:
    """
    Граница Хоффмана для Delta-регулярного графа

    Raises:
        RegularityError: граф не регулярен
        DegenerateGraphError: граф без рёбер
    """
    deg = degrees (g)
    if not is_regular (g):
        raise RegularityError (f"Граница Хоффмана требует регулярного графа (степени {min (deg)}..{max (deg)})")
    delta = deg[0]
    if delta == 0:
        raise DegenerateGraphError ("Граница Хоффмана не определена для графа без рёбер")

    spectrum = eigenvalues_hermitian (adjacency_matrix (g))
    value = hoffman_ratio (g.n, delta, spectrum.smallest)
    return BoundReport (
        graph=graph_id, k=1, bound='hoffman', value=value, floor=safe_floor (value),
        witness={"degree": delta, "lambda_min": spectrum.smallest},
    )


def vdh_bound(g: Graph, graph_id: str = "") -> BoundReport:
    """
    Граница ван Дама–Хемерса n (mu1 - delta) / mu1

    Raises:
        DegenerateGraphError: граф без рёбер (mu1 = 0)
    """
    if g.m == 0:
        raise DegenerateGraphError ("Граница ван Дама–Хемерса не определена для графа без рёбер")
    mu1 = eigenvalues_hermitian (laplacian (g)).largest
    delta = min (degrees (g))
    value = g.n * (mu1 - delta) / mu1
    return BoundReport (
        graph=graph_id, k=1, bound='vdh', value=value, floor=safe_floor (value),
        witness={"mu1": mu1, "min_degree": delta},
    )


# Сводка границ
def bound_chain(g: Graph, k: int = 1, policy: Optional[ZeroPolicy] = None,
                p: Optional[Polynomial] = None, graph_id: str = "",
                oracle_budget: Optional[int] = DEFAULT_BUDGET, grid: bool = False,
                epsilon: float = 1e-9) -> List[BoundReport]:
    """
    Все применимые границы для (g, k) и точное alpha_k, если позволяет бюджет

    Args:
        g: граф
        k: параметр расстояния
        policy: политика нулей для инерционных границ (None - по умолчанию)
        p: многочлен полиномиальной границы (по умолчанию x^k)
        graph_id: идентификатор графа
        oracle_budget: бюджет точного оракула; None - без точного значения
        grid: выбрать многочлен перебором x^k + c x
        epsilon: порог сравнения полиномиальной границы, если policy не задана

    Returns:
        List[BoundReport]: границы и (при наличии) запись 'exact'; tight отмечает равенство floor и alpha_k
    """
    if k < 1:
        raise ContractViolationError (f"k должно быть >= 1, получено {k}")
    if p is not None and p.degree > k:
        raise ContractViolationError (f"Степень многочлена {p.degree} больше k = {k}")

    poly_policy = policy if policy is not None else ZeroPolicy.tolerance (epsilon)
    reports = [graph_inertia_bound (g, policy, graph_id, k)]
    if k >= 2:
        reports.append (inertia_bound (adjacency_matrix (power_graph (g, k)), policy, graph_id, k,
                                       name='inertia_power'))

    if grid:
        reports.append (best_grid_polynomial (g, k, poly_policy, graph_id)[1])
    else:
        reports.append (poly_spectral_bound (g, p or Polynomial.monomial (k), poly_policy, graph_id, k))

    if k == 1 and g.m > 0:
        if is_regular (g):
            reports.append (hoffman_bound (g, graph_id))
        else:
            logger.debug (f"{graph_id}: граница Хоффмана пропущена (граф не регулярен)")
        reports.append (vdh_bound (g, graph_id))

    if oracle_budget is not None:
        try:
            size, cert = alpha_k_exact (g, k, budget=oracle_budget)
        except BudgetExceededError as e:
            logger.warning (f"{graph_id}: точное значение не вычислено: {e}")
        else:
            for report in reports:
                report.tight = report.floor == size
            reports.append (BoundReport (
                graph=graph_id, k=k, bound='exact', value=size, floor=size, tight=True,
                witness={"vertices": cert.vertices},
            ))
    return reports


def report_to_json(report: BoundReport) -> Dict[str, Any]:
    """BoundReport по JSON-схеме отчёта о границе"""
    return report.to_json ()
