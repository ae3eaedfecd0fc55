"""
Модуль точного оракула для SpectralIndep

Точное число независимости alpha и k-независимости alpha_k методом ветвей
и границ на битовых множествах, с верхней оценкой через жадное покрытие
кликами. Среди максимальных множеств возвращается лексикографически
наименьшее, поэтому сертификаты детерминированы.
"""

from itertools import combinations
from fractions import Fraction
from typing import List, Dict, Any, Optional, Tuple

from pydantic import ValidationError

from models import (
    IndependentSetCert, VerificationReport, Violation,
    BudgetExceededError, ContractViolationError, CertificateFormatError
)
from graph_core import Graph, neighbors, power_graph, distance_matrix
from utils import get_logger

logger = get_logger ('exact_oracle')

DEFAULT_BUDGET = 40
HARD_CAP = 128
NAIVE_MAX_N = 20


def _lowest(mask: int) -> int:
    """Индекс младшего установленного бита"""
    return (mask & -mask).bit_length () - 1


class _IndependentSetSolver:
    """
    Ветви и границы для максимального независимого множества

    Вершины кодируются битами целого числа Python; граница в узле -
    число клик в жадном покрытии кандидатов (в каждую клику попадает
    не более одной вершины независимого множества).
    """

    def __init__(self, g: Graph):
        self.n = g.n
        self.adj = [sum (1 << u for u in row) for row in neighbors (g)]
        self.nodes = 0

    def clique_cover(self, candidates: int) -> int:
        """Число клик в жадном покрытии множества candidates"""
        count = 0
        while candidates:
            clique = candidates & -candidates
            pool = candidates & self.adj[_lowest (clique)]
            while pool:
                bit = pool & -pool
                clique |= bit
                pool &= self.adj[_lowest (bit)]
            candidates &= ~clique
            count += 1
        return count

    def maximum(self, candidates: int, target: Optional[int] = None) -> int:
        """
        Размер наибольшего независимого множества внутри candidates

        Args:
            candidates: битовая маска допустимых вершин
            target: если задано, поиск останавливается при достижении этого размера

        Returns:
            int: размер множества
        """
        best = [0]
        limit = target if target is not None else self.n + 1

        def expand(size: int, pool: int) -> None:
            self.nodes += 1
            if size > best[0]:
                best[0] = size
            if not pool or best[0] >= limit:
                return
            if size + self.clique_cover (pool) <= best[0]:
                return

            v = _lowest (pool)
            bit = 1 << v
            if not pool & self.adj[v]:
                # Изолированная среди кандидатов вершина всегда входит в ответ
                expand (size + 1, pool & ~bit)
                return
            expand (size + 1, pool & ~bit & ~self.adj[v])
            expand (size, pool & ~bit)

        expand (0, candidates)
        return best[0]

    def lexicographic_maximum(self) -> List[int]:
        """Лексикографически наименьшее из максимальных независимых множеств"""
        full = (1 << self.n) - 1
        remaining = self.maximum (full)
        chosen = []
        pool = full
        for v in range (self.n):
            if remaining == 0:
                break
            bit = 1 << v
            if not pool & bit:
                continue
            rest = pool & ~bit & ~self.adj[v] & ~((bit << 1) - 1)
            if 1 + self.maximum (rest, target=remaining - 1) >= remaining:
                chosen.append (v)
                pool = rest
                remaining -= 1
            else:
                pool &= ~bit
        return chosen


def _check_budget(n: int, budget: Optional[int]) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if budget < 1:
        raise ContractViolationError (f"Бюджет оракула должен быть положительным, получено {budget}")
    if budget > HARD_CAP:
        raise ContractViolationError (f"Бюджет оракула {budget} выше жёсткого предела {HARD_CAP}")
    if n > budget:
        raise BudgetExceededError (f"Граф с {n} вершинами превышает бюджет точного оракула ({budget})")


def alpha_exact(g: Graph, budget: Optional[int] = DEFAULT_BUDGET) -> Tuple[int, IndependentSetCert]:
    """
    Точное число независимости

    Args:
        g: граф
        budget: наибольшее число вершин (не выше HARD_CAP)

    Returns:
        Tuple[int, IndependentSetCert]: alpha и лексикографически наименьшее максимальное множество

    Raises:
        BudgetExceededError: граф больше бюджета
    """
    _check_budget (g.n, budget)
    solver = _IndependentSetSolver (g)
    vertices = solver.lexicographic_maximum ()
    logger.debug (f"alpha = {len (vertices)} (n = {g.n}, узлов поиска: {solver.nodes})")
    return len (vertices), IndependentSetCert (vertices=vertices, k=1)


def alpha_k_exact(g: Graph, k: int, budget: Optional[int] = DEFAULT_BUDGET) -> Tuple[int, IndependentSetCert]:
    """
    Точное alpha_k(G) = alpha(G^[k])

    Args:
        g: граф
        k: параметр расстояния, k >= 1
        budget: наибольшее число вершин

    Returns:
        Tuple[int, IndependentSetCert]: alpha_k и сертификат с попарными расстояниями больше k
    """
    _check_budget (g.n, budget)
    size, cert = alpha_exact (power_graph (g, k), budget)
    return size, IndependentSetCert (vertices=cert.vertices, k=k)


def alpha_naive(g: Graph, k: int = 1, max_n: int = NAIVE_MAX_N) -> Tuple[int, IndependentSetCert]:
    """
    Полный перебор подмножеств по убыванию размера (эталон для проверки оракула)

    Raises:
        BudgetExceededError: n > max_n
    """
    if g.n > max_n:
        raise BudgetExceededError (f"Полный перебор ограничен {max_n} вершинами, получено {g.n}")
    h = power_graph (g, k)
    adj = neighbors (h)
    for size in range (h.n, 0, -1):
        for subset in combinations (range (h.n), size):
            members = set (subset)
            if all (not members.intersection (adj[v]) for v in subset):
                return size, IndependentSetCert (vertices=list (subset), k=k)
    return 0, IndependentSetCert (vertices=[], k=k)


def verify_independent_set(g: Graph, cert: IndependentSetCert) -> VerificationReport:
    """
    Проверяет, что вершины сертификата попарно на расстоянии больше k

    Args:
        g: граф
        cert: сертификат (вершины и k)

    Returns:
        VerificationReport: нарушения 'near_pair' (residual - расстояние), value = |S|

    Raises:
        CertificateFormatError: вершина вне диапазона или повторяется
    """
    seen = set ()
    for v in cert.vertices:
        if not 0 <= v < g.n:
            raise CertificateFormatError (f"Вершина {v} вне диапазона 0..{g.n - 1}")
        if v in seen:
            raise CertificateFormatError (f"Вершина {v} повторяется в сертификате")
        seen.add (v)

    dist = distance_matrix (g)
    violations = [
        Violation (condition='near_pair', indices=[u, v], residual=float (dist[u, v]))
        for u, v in combinations (sorted (seen), 2) if dist[u, v] <= cert.k
    ]
    return VerificationReport (violations=violations, value=Fraction (len (seen)))


# Сертификат в JSON
def load_independent_set(data: Dict[str, Any]) -> IndependentSetCert:
    """Читает {"k": int, "vertices": [int, ...]}"""
    try:
        return IndependentSetCert.model_validate (data)
    except ValidationError as e:
        raise CertificateFormatError (f"Некорректный сертификат независимого множества: {e}") from e
