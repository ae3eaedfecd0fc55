"""
Модуль поиска весов для SpectralIndep

Поиск эрмитова взвешивания H∘A, на котором инерционная граница
n0 + min(n+, n-) совпадает с числом независимости, случайными
перезапусками и покоординатным восхождением. Кандидат, достигший цели
в плавающей арифметике, перепроверяется в рациональной арифметике
после округления весов. Здесь же проверка сохранения нулевого шаблона
p(A) при переходе к p(H∘A).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Any, Union

import numpy as np

from models import (
    SearchResult, BoundReport, ZeroPolicy, Inertia, Spectrum,
    WeightPatternError, AssertionFailure, ContractViolationError
)
from graph_core import Graph, adjacency_matrix
from spectra import eigenvalues_hermitian, classify_spectrum, exact_ldl_inertia, RationalMatrix
from bounds import Polynomial, inertia_bound
from exact_oracle import alpha_exact, DEFAULT_BUDGET
from utils import get_logger, matrix_to_json, run_pool

logger = get_logger ('weight_search')

FIELD_REAL = "real"
FIELD_HERMITIAN = "hermitian"
FIELDS = (FIELD_REAL, FIELD_HERMITIAN)

RESTART_BATCH = 8  # Перезапуски идут пачками фиксированного размера: результат не зависит от числа потоков
DEFAULT_DENOMINATOR = 10000

Seed = Union[int, np.random.SeedSequence]


@dataclass
class WeightMatrix:
    """Эрмитова матрица H∘A с носителем внутри множества рёбер"""
    matrix: np.ndarray
    field: str = FIELD_REAL

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> Dict[str, Any]:
        return {"field": self.field, "matrix": matrix_to_json (self.matrix)}


def _check_field(field: str) -> None:
    if field not in FIELDS:
        raise ContractViolationError (f"Неизвестное поле весов: {field} (допустимо: {', '.join (FIELDS)})")


def check_pattern(g: Graph, w: WeightMatrix) -> None:
    """
    Проверяет нулевую диагональ и носитель внутри рёбер графа

    Raises:
        WeightPatternError: нарушен шаблон H∘A
    """
    m = np.asarray (w.matrix)
    if m.shape != (g.n, g.n):
        raise WeightPatternError (f"Форма весовой матрицы {m.shape} не совпадает с n = {g.n}")
    if np.any (np.diagonal (m) != 0):
        raise WeightPatternError ("Диагональ весовой матрицы должна быть нулевой")
    outside = (adjacency_matrix (g) == 0) & (m != 0)
    np.fill_diagonal (outside, False)
    if np.any (outside):
        u, v = (int (x) for x in np.argwhere (outside)[0])
        raise WeightPatternError (f"Ненулевой вес на паре ({u}, {v}), не являющейся ребром")
    if w.field == FIELD_REAL and np.iscomplexobj (m) and np.any (m.imag):
        raise WeightPatternError ("Вещественное поле весов содержит мнимые части")


def random_weighting(g: Graph, seed: Seed, field: str = FIELD_REAL) -> WeightMatrix:
    """
    Независимые стандартные нормальные (или комплексные нормальные) веса на рёбрах

    Args:
        g: граф
        seed: зерно или SeedSequence
        field: 'real' или 'hermitian'

    Returns:
        WeightMatrix: детерминирована по (g, seed, field)
    """
    _check_field (field)
    rng = np.random.default_rng (seed)
    return WeightMatrix (matrix=_draw_weights (g, rng, field), field=field)


def _draw_weights(g: Graph, rng: np.random.Generator, field: str) -> np.ndarray:
    edges = g.sorted_edges ()
    if field == FIELD_REAL:
        m = np.zeros ((g.n, g.n))
        values = rng.standard_normal (len (edges))
    else:
        m = np.zeros ((g.n, g.n), dtype=complex)
        values = (rng.standard_normal (len (edges)) + 1j * rng.standard_normal (len (edges))) / np.sqrt (2)
    for (u, v), z in zip (edges, values):
        m[u, v] = z
        m[v, u] = np.conj (z)
    return m


def weighted_inertia_bound(w: WeightMatrix, policy: Optional[ZeroPolicy] = None,
                           g: Optional[Graph] = None, graph_id: str = "") -> BoundReport:
    """
    Инерционная граница взвешенной матрицы

    Args:
        w: весовая матрица
        policy: политика нулей (None - по умолчанию для типа матрицы)
        g: граф для проверки шаблона (опционально)
        graph_id: идентификатор графа для отчёта

    Returns:
        BoundReport: граница 'weighted_inertia'
    """
    if g is not None:
        check_pattern (g, w)
    return inertia_bound (w.matrix, policy, graph_id, name='weighted_inertia')


# Точная перепроверка
def rationalize_weights(w: WeightMatrix, denominator: int = DEFAULT_DENOMINATOR) -> RationalMatrix:
    """
    Округляет веса до рациональных чисел со знаменателем не больше denominator

    Нижний треугольник строится сопряжением верхнего, поэтому результат точно эрмитов.
    """
    m = np.asarray (w.matrix, dtype=complex)
    n = m.shape[0]
    re = np.full ((n, n), Fraction (0), dtype=object)
    im = np.full ((n, n), Fraction (0), dtype=object)
    for u in range (n):
        for v in range (u + 1, n):
            if m[u, v] == 0:
                continue
            a = Fraction (float (m[u, v].real)).limit_denominator (denominator)
            b = Fraction (float (m[u, v].imag)).limit_denominator (denominator)
            re[u, v], re[v, u] = a, a
            im[u, v], im[v, u] = b, -b
    return re, im


def exact_weighted_bound(rational: RationalMatrix) -> int:
    """n0 + min(n+, n-) в точной арифметике"""
    return exact_ldl_inertia (rational).bound ()


def rational_to_numeric(rational: RationalMatrix) -> np.ndarray:
    re, im = rational
    result = re.astype (float) + 1j * im.astype (float)
    return result if np.any (result.imag) else result.real


# Целевая функция
def surrogate(spectrum: Spectrum, inertia: Inertia, epsilon: float) -> float:
    """
    Непрерывная добавка в [0, 1) к целочисленной границе

    Наименьший |l| среди собственных значений, не принадлежащих стороне
    большинства (нули и меньшинство по знаку), делённый на max(1, max |l|)
    и переведённый через x / (1 + x).
    """
    values = np.asarray (spectrum.eigenvalues)
    if values.size == 0:
        return 0.0
    threshold = epsilon * max (1.0, float (np.max (np.abs (values))))
    if inertia.n_plus > inertia.n_minus:
        pool = values[values <= threshold]
    elif inertia.n_minus > inertia.n_plus:
        pool = values[values >= -threshold]
    else:
        pool = values
    if pool.size == 0:
        return 0.0
    x = float (np.min (np.abs (pool))) / max (1.0, float (np.max (np.abs (values))))
    return x / (1.0 + x)


@dataclass
class _Candidate:
    bound: int
    objective: float
    matrix: np.ndarray
    exact: bool = False


class WeightHillClimber:
    """
    Один перезапуск покоординатного восхождения

    Шаг возмущения убывает геометрически от step_initial до step_final;
    кандидат принимается, если целевая функция не ухудшилась.
    """

    def __init__(self, g: Graph, target: int, field: str, epsilon: float,
                 iterations: int, step_initial: float, step_final: float, denominator: int):
        self.g = g
        self.edges = g.sorted_edges ()
        self.target = target
        self.field = field
        self.epsilon = epsilon
        self.iterations = iterations
        self.step_initial = step_initial
        self.step_final = step_final
        self.denominator = denominator
        self.count = 0

    def evaluate(self, m: np.ndarray) -> _Candidate:
        """Граница в режиме tolerance; достижение цели перепроверяется точно"""
        self.count += 1
        spectrum = eigenvalues_hermitian (m)
        inertia = classify_spectrum (spectrum, self.epsilon)
        bound = inertia.bound ()
        if bound < self.target:
            raise AssertionFailure (
                f"Взвешенная граница {bound} меньше alpha = {self.target}: ошибка классификации нулей")
        candidate = _Candidate (bound=bound, objective=bound + surrogate (spectrum, inertia, self.epsilon), matrix=m)
        if bound == self.target:
            rational = rationalize_weights (WeightMatrix (m, self.field), self.denominator)
            exact = exact_weighted_bound (rational)
            if exact == self.target:
                return _Candidate (bound=exact, objective=float (exact), matrix=rational_to_numeric (rational), exact=True)
            # Округлённая матрица даёт корректную, но более слабую границу
            logger.debug (f"Точная перепроверка не подтвердила цель: {exact} > {self.target}")
            candidate.bound = exact
            candidate.objective = float (exact)
        return candidate

    def step(self, iteration: int) -> float:
        if self.iterations <= 1:
            return self.step_initial
        ratio = self.step_final / self.step_initial
        return self.step_initial * ratio ** (iteration / (self.iterations - 1))

    def climb(self, start: np.ndarray, rng: np.random.Generator) -> Dict[str, Any]:
        """
        Восхождение из начальной матрицы

        Returns:
            Dict[str, Any]: лучший кандидат, число итераций и флаг точной плотности
        """
        current = self.evaluate (start)
        best = current
        used = 0
        for iteration in range (self.iterations):
            if best.exact:
                break
            used += 1
            if not self.edges:
                break
            u, v = self.edges[int (rng.integers (len (self.edges)))]
            delta = rng.standard_normal () * self.step (iteration)
            if self.field == FIELD_HERMITIAN:
                delta = delta + 1j * rng.standard_normal () * self.step (iteration)
            m = current.matrix.copy ()
            m[u, v] += delta
            m[v, u] = np.conj (m[u, v])
            candidate = self.evaluate (m)
            if candidate.objective <= current.objective:
                current = candidate
                if current.objective < best.objective or current.exact:
                    best = current
        return {"best": best, "iterations": used}


def search_tight_weights(g: Graph, restarts: int = 20, iterations: int = 300,
                         step_initial: float = 1.0, step_final: float = 0.01,
                         field: str = FIELD_REAL, seed: int = 0,
                         policy: Optional[ZeroPolicy] = None, threads: int = 1,
                         target: Optional[int] = None, budget: Optional[int] = DEFAULT_BUDGET,
                         denominator: int = DEFAULT_DENOMINATOR) -> SearchResult:
    """
    Ищет взвешивание H∘A с инерционной границей, равной alpha(g)

    Перезапуск r использует SeedSequence(seed).spawn(restarts)[r]; перезапуск 0
    стартует с A, остальные - со случайных весов. Перезапуски выполняются
    пачками; после пачки с подтверждённой плотностью поиск останавливается.

    Args:
        g: граф
        restarts: число перезапусков
        iterations: итераций восхождения на перезапуск
        step_initial: начальный шаг возмущения
        step_final: конечный шаг возмущения
        field: 'real' или 'hermitian'
        seed: зерно
        policy: политика нулей (берётся epsilon)
        threads: размер пула
        target: alpha(g), если уже известно
        budget: бюджет точного оракула
        denominator: знаменатель сетки для точной перепроверки

    Returns:
        SearchResult: лучшая граница - минимум по всем посещённым кандидатам
    """
    _check_field (field)
    if restarts < 1:
        raise ContractViolationError (f"Число перезапусков должно быть >= 1, получено {restarts}")
    if target is None:
        target = alpha_exact (g, budget)[0]
    epsilon = (policy or ZeroPolicy ()).epsilon
    children = np.random.SeedSequence (seed).spawn (restarts)
    dtype = complex if field == FIELD_HERMITIAN else float
    adjacency = adjacency_matrix (g).astype (dtype)

    def run(r: int) -> Dict[str, Any]:
        rng = np.random.default_rng (children[r])
        start = adjacency.copy () if r == 0 else _draw_weights (g, rng, field)
        climber = WeightHillClimber (g, target, field, epsilon, iterations, step_initial, step_final, denominator)
        result = climber.climb (start, rng)
        result["visited"] = climber.count
        logger.debug (f"Перезапуск {r}: граница {result['best'].bound}, кандидатов {climber.count}")
        return result

    results = []
    for offset in range (0, restarts, RESTART_BATCH):
        batch = range (offset, min (offset + RESTART_BATCH, restarts))
        results.extend (run_pool (run, batch, threads))
        if any (res["best"].exact for res in results):
            break

    restart_bounds = [res["best"].bound for res in results]
    found = next ((r for r, res in enumerate (results) if res["best"].exact), None)
    chosen = found if found is not None else int (np.argmin ([res["best"].objective for res in results]))
    best = results[chosen]["best"]

    return SearchResult (
        best_bound=min (restart_bounds),
        target=target,
        tight=found is not None,
        iterations=sum (res["iterations"] for res in results),
        seed=seed,
        field=field,
        restart_found=found,
        exact_verified=best.exact,
        visited=sum (res["visited"] for res in results),
        restart_bounds=restart_bounds,
        best_weights=matrix_to_json (best.matrix),
    )


# Шаблон нулей
def hadamard_zero_pattern_check(g: Graph, h: WeightMatrix, p: Polynomial,
                                tol: Optional[float] = None) -> bool:
    """
    Проверяет (p(A))_uv = 0 => (p(H∘A))_uv = 0 для внедиагональных пар

    Проверяются структурные нули: пары, для которых (A^j)_uv = 0 при всех j
    с ненулевым коэффициентом. Нули p(A), возникшие от сокращения
    коэффициентов, пропускаются и учитываются в журнале.

    Args:
        g: граф
        h: взвешивание H∘A
        p: многочлен
        tol: допуск; по умолчанию 1e-8 * max(1, ||H∘A||_F) * n^2

    Returns:
        bool: True, если все структурные нули сохраняются
    """
    check_pattern (g, h)
    a = adjacency_matrix (g).astype (object)
    n = g.n
    if tol is None:
        tol = 1e-8 * max (1.0, float (np.linalg.norm (h.matrix))) * n * n

    support = [j for j, c in enumerate (p.coefficients) if c != 0]
    power = np.eye (n, dtype=int).astype (object)
    structural = np.ones ((n, n), dtype=bool)
    for j in range (max (support, default=0) + 1):
        if j in support:
            structural &= (power == 0).astype (bool)
        power = power.dot (a)
    np.fill_diagonal (structural, False)

    weighted = p.evaluate_matrix (np.asarray (h.matrix))
    if p.is_rational:
        exact_zero = (p.evaluate_matrix_exact (adjacency_matrix (g)) == 0).astype (bool)
        np.fill_diagonal (exact_zero, False)
        cancelled = int (np.sum (exact_zero & ~structural))
        if cancelled:
            logger.debug (f"Пропущено нулей от сокращения коэффициентов: {cancelled}")

    failures = np.abs (weighted[structural]) > tol
    if np.any (failures):
        logger.warning (f"Нарушений шаблона нулей: {int (np.sum (failures))}")
        return False
    return True
