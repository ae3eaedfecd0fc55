"""
Модуль спектров для SpectralIndep

Собственные значения вещественных симметричных и комплексных эрмитовых матриц,
инерция в двух режимах (точное рациональное LDL и численный спектр с порогом)
и матрица Лапласа графа.
"""

from fractions import Fraction
from typing import List, Optional, Any, Tuple

import numpy as np
import scipy.linalg

from models import (
    Spectrum, Inertia, ZeroPolicy, ZERO_EXACT,
    ContractViolationError, InertiaModeError
)
from graph_core import Graph, adjacency_matrix, degrees
from utils import get_logger

logger = get_logger ('spectra')

HERMITIAN_RTOL = 1e-12
RECONSTRUCTION_RTOL = 1e-8
EXACT_MAX_N = 200  # Выше этого размера точный режим по умолчанию не выбирается

# Рациональная эрмитова матрица: (вещественная часть, мнимая часть), object-массивы Fraction
RationalMatrix = Tuple[np.ndarray, np.ndarray]


def as_numeric(m: Any) -> np.ndarray:
    """
    Приводит матрицу к numpy (float или complex); Fraction и пары (re, im) допускаются

    Args:
        m: матрица в любом поддерживаемом виде

    Returns:
        np.ndarray: квадратная численная матрица
    """
    if isinstance (m, tuple) and len (m) == 2:
        re, im = m
        result = np.asarray (re, dtype=float) + 1j * np.asarray (im, dtype=float)
    else:
        result = np.asarray (m)
        if result.dtype == object:
            result = result.astype (float)
    if result.ndim != 2 or result.shape[0] != result.shape[1]:
        raise ContractViolationError (f"Ожидалась квадратная матрица, получена форма {result.shape}")
    if np.iscomplexobj (result) and not np.any (result.imag):
        result = result.real
    return result


def is_hermitian(m: Any, rtol: float = HERMITIAN_RTOL) -> bool:
    """Проверка ||m - m*|| <= rtol * ||m||"""
    m = as_numeric (m)
    return np.linalg.norm (m - m.conj ().T) <= rtol * np.linalg.norm (m)


def _checked(m: Any) -> np.ndarray:
    m = as_numeric (m)
    if not np.all (np.isfinite (m)):
        raise ContractViolationError ("Матрица содержит нечисловые элементы")
    if not is_hermitian (m):
        asym = np.linalg.norm (m - m.conj ().T)
        raise ContractViolationError (f"Матрица не эрмитова: ||M - M*|| = {asym:.3e}")
    return m


def eigh(m: Any, vectors: bool = False) -> Tuple[Spectrum, Optional[np.ndarray]]:
    """
    Спектральное разложение эрмитовой матрицы

    Args:
        m: эрмитова матрица
        vectors: вычислять ли собственные векторы

    Returns:
        Tuple[Spectrum, Optional[np.ndarray]]: спектр по убыванию и столбцы собственных векторов в том же порядке
    """
    m = _checked (m)
    if m.shape[0] == 0:
        return Spectrum (eigenvalues=[]), None

    if not vectors:
        values = scipy.linalg.eigvalsh (m, check_finite=False)
        return Spectrum (eigenvalues=[float (x) for x in values[::-1]]), None

    values, vecs = scipy.linalg.eigh (m, check_finite=False)
    values, vecs = values[::-1], vecs[:, ::-1]

    # Проверка восстановления M = Q diag(L) Q*
    residual = np.linalg.norm (m - (vecs * values) @ vecs.conj ().T)
    scale = max (1.0, np.linalg.norm (m))
    if residual > RECONSTRUCTION_RTOL * scale:
        raise ContractViolationError (f"Невязка разложения {residual:.3e} превышает допуск")
    return Spectrum (eigenvalues=[float (x) for x in values]), vecs


def eigenvalues_hermitian(m: Any) -> Spectrum:
    """Собственные значения эрмитовой матрицы по убыванию"""
    return eigh (m)[0]


def laplacian(g: Graph) -> np.ndarray:
    """Матрица Лапласа D - A"""
    return np.diag (degrees (g)).astype (np.int64) - adjacency_matrix (g)


# Инерция
def is_integer_valued(m: Any) -> bool:
    """Все элементы вещественны и целы"""
    if isinstance (m, tuple):
        return False
    arr = np.asarray (m)
    if arr.dtype == object:
        return all (_is_integral (x) for x in arr.flat)
    if np.issubdtype (arr.dtype, np.integer) or arr.dtype == bool:
        return True
    if np.iscomplexobj (arr):
        if np.any (arr.imag):
            return False
        arr = arr.real
    return bool (np.all (np.isfinite (arr)) and np.all (arr == np.round (arr)))


def _is_integral(x: Any) -> bool:
    if isinstance (x, (bool, np.bool_)):
        return True
    if isinstance (x, (int, np.integer)):
        return True
    if isinstance (x, Fraction):
        return x.denominator == 1
    if isinstance (x, (float, np.floating)):
        return bool (np.isfinite (x) and float (x).is_integer ())
    return False


def default_policy(m: Any, epsilon: float = 1e-9) -> ZeroPolicy:
    """Точный режим для целочисленных матриц умеренного размера, иначе tolerance"""
    size = len (m[0]) if isinstance (m, tuple) else np.asarray (m).shape[0]
    if is_integer_valued (m) and size <= EXACT_MAX_N:
        return ZeroPolicy.exact ()
    return ZeroPolicy.tolerance (epsilon)


def inertia(m: Any, policy: Optional[ZeroPolicy] = None) -> Inertia:
    """
    Инерция (n+, n0, n-) эрмитовой матрицы

    Args:
        m: эрмитова матрица
        policy: политика нулей; None - точный режим для целочисленных матриц

    Returns:
        Inertia: тройка с n+ + n0 + n- = n
    """
    if policy is None:
        policy = default_policy (m)
    if policy.mode == ZERO_EXACT:
        return exact_ldl_inertia (m)

    spectrum = eigenvalues_hermitian (m)
    return classify_spectrum (spectrum, policy.epsilon)


def zero_threshold(spectrum: Spectrum, epsilon: float) -> float:
    """Порог eps * max(1, ||M||_2)"""
    norm = max ((abs (x) for x in spectrum.eigenvalues), default=0.0)
    return epsilon * max (1.0, norm)


def classify_spectrum(spectrum: Spectrum, epsilon: float) -> Inertia:
    """Знаки собственных значений с относительным порогом нуля"""
    threshold = zero_threshold (spectrum, epsilon)
    n_plus = sum (1 for x in spectrum.eigenvalues if x > threshold)
    n_minus = sum (1 for x in spectrum.eigenvalues if x < -threshold)
    return Inertia (n_plus=n_plus, n_zero=spectrum.n - n_plus - n_minus, n_minus=n_minus)


def _to_fraction(x: Any) -> Fraction:
    if isinstance (x, Fraction):
        return x
    if isinstance (x, (bool, np.bool_, int, np.integer)):
        return Fraction (int (x))
    if isinstance (x, (float, np.floating)):
        if np.isfinite (x) and float (x).is_integer ():
            return Fraction (int (x))
    raise InertiaModeError (f"Элемент {x!r} не является точным рациональным числом")


def to_rational_matrix(m: Any) -> RationalMatrix:
    """
    Переводит матрицу в пару object-массивов Fraction (re, im)

    Допускаются целые числа, Fraction и целочисленные float/complex; прочие
    значения вызывают InertiaModeError.
    """
    if isinstance (m, tuple) and len (m) == 2:
        re = np.vectorize (_to_fraction, otypes=[object]) (np.asarray (m[0], dtype=object))
        im = np.vectorize (_to_fraction, otypes=[object]) (np.asarray (m[1], dtype=object))
        return re, im

    arr = np.asarray (m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolationError (f"Ожидалась квадратная матрица, получена форма {arr.shape}")
    if arr.size == 0:
        empty = np.zeros (arr.shape, dtype=object)
        return empty, empty.copy ()
    if arr.dtype != object and np.iscomplexobj (arr):
        re = np.vectorize (_to_fraction, otypes=[object]) (arr.real)
        im = np.vectorize (_to_fraction, otypes=[object]) (arr.imag)
        return re, im
    re = np.vectorize (_to_fraction, otypes=[object]) (arr.astype (object))
    im = np.full (arr.shape, Fraction (0), dtype=object)
    return re, im


def exact_ldl_inertia(m: Any) -> Inertia:
    """
    Инерция в точной рациональной арифметике.

    Симметричное исключение конгруэнциями (закон инерции Сильвестра):
    ведущий элемент 1x1 - любой ненулевой диагональный, иначе блок 2x2
    [[0, b], [b, 0]], дающий по одному положительному и отрицательному
    значению. Эрмитова матрица с мнимой частью обрабатывается через
    вещественное вложение [[Re, -Im], [Im, Re]], инерция которого вдвое больше.
    """
    re, im = to_rational_matrix (m)
    n = re.shape[0]
    if np.any (re != re.T) or np.any (im != -im.T):
        raise ContractViolationError ("Матрица не эрмитова в точной арифметике")

    if any (x != 0 for x in im.flat):
        embedded = np.block ([[re, -im], [im, re]])
        doubled = _symmetric_inertia ([list (row) for row in embedded])
        return Inertia (n_plus=doubled[0] // 2, n_zero=doubled[1] // 2, n_minus=doubled[2] // 2)

    result = _symmetric_inertia ([list (row) for row in re])
    logger.debug (f"Точная инерция n={n}: {result}")
    return Inertia (n_plus=result[0], n_zero=result[1], n_minus=result[2])


def _symmetric_inertia(a: List[List[Fraction]]) -> Tuple[int, int, int]:
    """Исключение на месте; a - симметричная матрица Fraction"""
    active = list (range (len (a)))
    n_plus = n_minus = 0

    while active:
        pivot = next ((i for i in active if a[i][i] != 0), None)
        if pivot is not None:
            d = a[pivot][pivot]
            if d > 0:
                n_plus += 1
            else:
                n_minus += 1
            active.remove (pivot)
            column = {j: a[j][pivot] for j in active if a[j][pivot] != 0}
            for j, ajp in column.items ():
                factor = ajp / d
                row = a[j]
                for l, alp in column.items ():
                    row[l] -= factor * alp
            continue

        pair = next (((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
        if pair is None:
            break

        # Блок [[0, b], [b, 0]]: определитель -b^2 < 0
        i, j = pair
        b = a[i][j]
        n_plus += 1
        n_minus += 1
        active.remove (i)
        active.remove (j)
        col_i = {r: a[r][i] for r in active if a[r][i] != 0}
        col_j = {r: a[r][j] for r in active if a[r][j] != 0}
        for r in set (col_i) | set (col_j):
            ri, rj = col_i.get (r, 0), col_j.get (r, 0)
            row = a[r]
            for s in set (col_i) | set (col_j):
                row[s] -= (ri * col_j.get (s, 0) + rj * col_i.get (s, 0)) / b

    n_zero = len (a) - n_plus - n_minus
    return n_plus, n_zero, n_minus


def count_components_by_laplacian(g: Graph, epsilon: float = 1e-9) -> int:
    """Кратность нуля в спектре Лапласа"""
    return inertia (laplacian (g), ZeroPolicy.tolerance (epsilon)).n_zero
