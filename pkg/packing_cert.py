"""
Модуль сертификатов упаковок для SpectralIndep

Проверка и оценка k-проективных упаковок (семейство ортогональных проекторов
P(u), попарно ортогональных по следу для вершин на расстоянии не больше k)
и квантовых сертификатов k-независимости (проекторы P(u, i), i < t,
с разбиением единицы по каждому i). Сертификаты только проверяются; единственная
конструкция - подъём классического независимого множества при d = 1.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Dict, Optional, Any, Tuple, Union

import numpy as np

from models import (
    IndependentSetCert, VerificationReport, Violation,
    ProjectorError, CertificateFormatError, ContractViolationError
)
from graph_core import Graph, distance_matrix
from spectra import eigh
from exact_oracle import verify_independent_set
from utils import get_logger, matrix_to_json, matrix_from_json, run_pool

logger = get_logger ('packing_cert')

DEFAULT_TOL = 1e-8
TRACE_GUARD = 10  # Допуск на дробную часть следа: TRACE_GUARD * tol
KIND_PACKING = "packing"
KIND_QUANTUM = "quantum"
ROUNDING = 1e-12


@dataclass
class PackingCertificate:
    """k-проективная упаковка: вершина -> проектор d x d"""
    d: int
    projectors: Dict[int, np.ndarray]
    k: Optional[int] = None


@dataclass
class QuantumCertificate:
    """Квантовый сертификат: (вершина, i) -> проектор d x d, i < t"""
    d: int
    t: int
    projectors: Dict[Tuple[int, int], np.ndarray]
    k: Optional[int] = None


@dataclass
class ProjectorCheck:
    """Невязки проверки одного проектора"""
    rank: Optional[int]
    residuals: Dict[str, float] = field (default_factory=dict)


def trace_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Скалярное произведение по следу tr(X* Y)"""
    return complex (np.vdot (x, y))


def _scale(m: np.ndarray) -> float:
    return max (1.0, float (np.linalg.norm (m)))


def inspect_projector(m: np.ndarray, tol: float = DEFAULT_TOL) -> ProjectorCheck:
    """
    Невязки эрмитовости, идемпотентности и дробности следа без исключений

    Returns:
        ProjectorCheck: rank = None, если матрица не проектор
    """
    m = np.asarray (m, dtype=complex)
    scale = _scale (m)
    trace = np.trace (m)
    residuals = {
        "hermitian": float (np.linalg.norm (m - m.conj ().T)),
        "idempotent": float (np.linalg.norm (m @ m - m)),
        "trace": float (abs (trace.real - round (trace.real)) + abs (trace.imag)),
    }
    ok = (residuals["hermitian"] <= tol * scale
          and residuals["idempotent"] <= tol * scale
          and residuals["trace"] <= TRACE_GUARD * tol)
    return ProjectorCheck (rank=int (round (trace.real)) if ok else None, residuals=residuals)


def projector_check(m: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """
    Проверяет, что m - ортогональный проектор, и возвращает его ранг

    Args:
        m: комплексная матрица d x d
        tol: относительный допуск (невязки делятся на max(1, ||m||_F))

    Returns:
        int: ранг round(tr m)

    Raises:
        ProjectorError: матрица не эрмитова, не идемпотентна или имеет дробный след
    """
    m = np.asarray (m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise CertificateFormatError (f"Проектор должен быть квадратной матрицей, получена форма {m.shape}")
    check = inspect_projector (m, tol)
    if check.rank is None:
        raise ProjectorError ("Матрица не является ортогональным проектором", check.residuals)
    return check.rank


def random_projector(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Случайный комплексный проектор ранга rank (QR гауссова блока)"""
    if not 0 <= rank <= d:
        raise ContractViolationError (f"Ранг {rank} вне диапазона 0..{d}")
    if rank == 0:
        return np.zeros ((d, d), dtype=complex)
    block = rng.standard_normal ((d, rank)) + 1j * rng.standard_normal ((d, rank))
    q, _ = np.linalg.qr (block)
    return q @ q.conj ().T


# Упаковки
def _check_shapes(d: int, matrices: List[np.ndarray]) -> None:
    if d < 1:
        raise CertificateFormatError (f"Размерность d должна быть >= 1, получено {d}")
    for m in matrices:
        if np.shape (m) != (d, d):
            raise CertificateFormatError (f"Матрица формы {np.shape (m)} не совпадает с d = {d}")


def _near_pairs(g: Graph, k: int) -> List[Tuple[int, int]]:
    """Пары вершин на расстоянии от 1 до k"""
    dist = distance_matrix (g)
    return [(u, v) for u, v in combinations (range (g.n), 2) if 1 <= dist[u, v] <= k]


def packing_value(cert: PackingCertificate, tol: float = DEFAULT_TOL) -> Fraction:
    """(1/d) * сумма рангов, точное рациональное число"""
    total = sum (projector_check (m, tol) for m in cert.projectors.values ())
    return Fraction (total, cert.d)


def verify_packing(g: Graph, k: int, cert: PackingCertificate, tol: float = DEFAULT_TOL,
                   threads: int = 1) -> VerificationReport:
    """
    Проверяет k-проективную упаковку

    Args:
        g: граф
        k: параметр расстояния
        cert: проекторы для всех вершин (нулевой проектор допустим)
        tol: допуск невязок
        threads: размер пула для попарных проверок

    Returns:
        VerificationReport: нарушения 'projector' и 'orthogonality'; value = (1/d) * сумма рангов

    Raises:
        CertificateFormatError: индексация не совпадает с вершинами или размерности различаются
    """
    if set (cert.projectors) != set (range (g.n)):
        raise CertificateFormatError (f"Сертификат должен содержать проекторы для вершин 0..{g.n - 1}")
    _check_shapes (cert.d, list (cert.projectors.values ()))

    matrices = {u: np.asarray (m, dtype=complex) for u, m in cert.projectors.items ()}
    violations = []
    ranks = {}
    for u in range (g.n):
        check = inspect_projector (matrices[u], tol)
        if check.rank is None:
            violations.append (Violation (condition='projector', indices=[u],
                                          residual=max (check.residuals.values ())))
        else:
            ranks[u] = check.rank

    def pair_residual(pair: Tuple[int, int]) -> float:
        u, v = pair
        return abs (trace_inner (matrices[u], matrices[v]))

    pairs = _near_pairs (g, k)
    for (u, v), residual in zip (pairs, run_pool (pair_residual, pairs, threads)):
        if residual > tol * max (1.0, _scale (matrices[u]) * _scale (matrices[v])):
            violations.append (Violation (condition='orthogonality', indices=[u, v], residual=residual))

    value = Fraction (sum (ranks.values ()), cert.d) if len (ranks) == g.n else None
    logger.debug (f"Упаковка d={cert.d}, k={k}: нарушений {len (violations)}, значение {value}")
    return VerificationReport (violations=violations, value=value)


def lift_independent_set(g: Graph, cert: IndependentSetCert) -> PackingCertificate:
    """
    Подъём k-независимого множества в упаковку при d = 1: P(u) = 1 на множестве, иначе 0

    Raises:
        ContractViolationError: сертификат не проходит проверку
    """
    if not verify_independent_set (g, cert).valid:
        raise ContractViolationError ("Подъём требует корректного независимого множества")
    members = set (cert.vertices)
    projectors = {u: np.array ([[1.0 if u in members else 0.0]], dtype=complex) for u in range (g.n)}
    return PackingCertificate (d=1, projectors=projectors, k=cert.k)


# Квантовые сертификаты
def verify_quantum_cert(g: Graph, k: int, cert: QuantumCertificate,
                        tol: float = DEFAULT_TOL) -> VerificationReport:
    """
    Проверяет три условия квантового сертификата k-независимости

    1. сумма по u проекторов P(u, i) равна I_d для каждого i ('partition');
    2. P(u, i) и P(u, j) ортогональны по следу при i != j ('same_vertex');
    3. P(u, i) и P(v, j) ортогональны по следу при i != j и dist(u, v) <= k ('near_pair').

    Returns:
        VerificationReport: value = t для корректного сертификата

    Raises:
        CertificateFormatError: индексация не покрывает все пары (u, i) или размерности различаются
    """
    expected = {(u, i) for u in range (g.n) for i in range (cert.t)}
    if cert.t < 1 or set (cert.projectors) != expected:
        raise CertificateFormatError (
            f"Сертификат должен содержать проекторы для всех u < {g.n} и i < {cert.t}")
    _check_shapes (cert.d, list (cert.projectors.values ()))

    p = {key: np.asarray (m, dtype=complex) for key, m in cert.projectors.items ()}
    violations = []

    for key in sorted (p):
        check = inspect_projector (p[key], tol)
        if check.rank is None:
            violations.append (Violation (condition='projector', indices=list (key),
                                          residual=max (check.residuals.values ())))

    identity = np.eye (cert.d, dtype=complex)
    for i in range (cert.t):
        residual = float (np.linalg.norm (sum (p[(u, i)] for u in range (g.n)) - identity))
        if residual > tol * _scale (identity):
            violations.append (Violation (condition='partition', indices=[i], residual=residual))

    def orthogonal(a: np.ndarray, b: np.ndarray) -> Tuple[bool, float]:
        residual = abs (trace_inner (a, b))
        return residual <= tol * max (1.0, _scale (a) * _scale (b)), residual

    for u in range (g.n):
        for i, j in combinations (range (cert.t), 2):
            ok, residual = orthogonal (p[(u, i)], p[(u, j)])
            if not ok:
                violations.append (Violation (condition='same_vertex', indices=[u, i, j], residual=residual))

    for u, v in _near_pairs (g, k):
        for i in range (cert.t):
            for j in range (cert.t):
                if i == j:
                    continue
                ok, residual = orthogonal (p[(u, i)], p[(v, j)])
                if not ok:
                    violations.append (Violation (condition='near_pair', indices=[u, v, i, j], residual=residual))

    value = Fraction (cert.t) if not violations else None
    return VerificationReport (violations=violations, value=value)


def lift_to_quantum(g: Graph, cert: IndependentSetCert) -> QuantumCertificate:
    """
    Подъём непустого k-независимого множества S в квантовый сертификат при d = 1:
    строка i выбирает i-ю вершину S
    """
    if not cert.vertices:
        raise ContractViolationError ("Квантовый сертификат требует непустого множества")
    if not verify_independent_set (g, cert).valid:
        raise ContractViolationError ("Подъём требует корректного независимого множества")
    projectors = {
        (u, i): np.array ([[1.0 if u == s else 0.0]], dtype=complex)
        for u in range (g.n) for i, s in enumerate (cert.vertices)
    }
    return QuantumCertificate (d=1, t=len (cert.vertices), projectors=projectors, k=cert.k)


# Ортогональность по следу и собственные векторы
def range_basis(p: np.ndarray) -> np.ndarray:
    """Ортонормированный базис образа проектора (собственные векторы со значением 1)"""
    p = np.asarray (p, dtype=complex)
    spectrum, vectors = eigh ((p + p.conj ().T) / 2, vectors=True)
    keep = [i for i, x in enumerate (spectrum.eigenvalues) if x > 0.5]
    return vectors[:, keep]


def cross_products(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Матрица скалярных произведений <psi_k|phi_l> базисов образов p и q"""
    return range_basis (p).conj ().T @ range_basis (q)


def trace_orthogonality_check(p: np.ndarray, q: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """
    Ортогональность двух проекторов по следу через спектральные разложения

    tr(P* Q) = сумма |<psi_k|phi_l>|^2, поэтому ортогональность по следу
    равносильна ортогональности образов; равенство проверяется явно.

    Args:
        p: проектор
        q: проектор той же размерности
        tol: допуск

    Returns:
        bool: True, если |tr(P* Q)| <= tol (и все перекрёстные произведения малы)

    Raises:
        CertificateFormatError: размерности различаются
        ContractViolationError: два способа вычисления tr(P* Q) расходятся или критерий
            по следу не согласован с перекрёстными произведениями с учётом рангов
    """
    if np.shape (p) != np.shape (q):
        raise CertificateFormatError (f"Размерности проекторов различаются: {np.shape (p)} и {np.shape (q)}")
    rank_p = projector_check (p, tol)
    rank_q = projector_check (q, tol)

    inner = trace_inner (np.asarray (p, dtype=complex), np.asarray (q, dtype=complex))
    cross = cross_products (p, q)
    via_vectors = float (np.sum (np.abs (cross) ** 2))
    pairs = max (1, rank_p * rank_q)
    drift = abs (inner.real - via_vectors) + abs (inner.imag)
    if drift > TRACE_GUARD * tol * pairs:
        raise ContractViolationError (
            f"tr(P*Q) = {inner.real:.3e} расходится с суммой квадратов произведений {via_vectors:.3e}")

    by_trace = abs (inner) <= tol
    largest = float (np.max (np.abs (cross))) ** 2 if cross.size else 0.0
    # max |c|^2 <= сумма |c|^2 <= r_P * r_Q * max |c|^2
    all_small = largest * pairs <= tol - drift - ROUNDING
    if (all_small and not by_trace) or (by_trace and largest > tol + drift + ROUNDING):
        raise ContractViolationError (
            f"Ортогональность по следу (|tr| = {abs (inner):.3e}) расходится с произведениями "
            f"векторов (max |c|^2 = {largest:.3e}, ранги {rank_p} и {rank_q})")
    return by_trace


# JSON
def load_certificate(data: Dict[str, Any]) -> Union[PackingCertificate, QuantumCertificate]:
    """
    Читает сертификат; форма задаётся полем "kind", иначе ключом "t" или вложенностью

    Форматы:
        {"d": int, "k": int, "projectors": {"u": matrix}}
        {"d": int, "k": int, "t": int, "projectors": {"u": [matrix_0, ..., matrix_{t-1}]}}

    Raises:
        CertificateFormatError: некорректная структура или неоднозначная форма при d = 2
    """
    if not isinstance (data, dict) or "d" not in data or not isinstance (data.get ("projectors"), dict):
        raise CertificateFormatError ("Сертификат должен содержать поля 'd' и 'projectors'")
    d = data["d"]
    k = data.get ("k")
    if not isinstance (d, int) or isinstance (d, bool):
        raise CertificateFormatError ("Поле 'd' должно быть целым")
    raw = {}
    for key, value in data["projectors"].items ():
        try:
            raw[int (key)] = value
        except ValueError as e:
            raise CertificateFormatError (f"Индекс вершины {key!r} не является целым") from e

    kind = data.get ("kind")
    if kind not in (None, KIND_PACKING, KIND_QUANTUM):
        raise CertificateFormatError (f"Неизвестный вид сертификата {kind!r}")
    if kind == KIND_QUANTUM or (kind is None and ("t" in data or _detect_quantum (raw, d))):
        projectors = {}
        for u, matrices in raw.items ():
            if not isinstance (matrices, list):
                raise CertificateFormatError (f"Вершина {u}: ожидался список матриц")
            for i, m in enumerate (matrices):
                projectors[(u, i)] = matrix_from_json (m)
        t = data.get ("t", max ((len (v) for v in raw.values ()), default=0))
        return QuantumCertificate (d=d, t=t, projectors=projectors, k=k)

    return PackingCertificate (d=d, projectors={u: matrix_from_json (m) for u, m in raw.items ()}, k=k)


def _depth(value: Any) -> int:
    depth = 0
    while isinstance (value, list) and value:
        value = value[0]
        depth += 1
    return depth


def _entry_form(value: Any, d: int) -> Optional[bool]:
    """
    Форма записи вершины: True - список матриц, False - одна матрица, None - не определить

    Матрица d x d имеет вложенность 2 (числа) или 3 (пары [re, im]),
    список из t матриц - 3 или 4. При вложенности 3 и d != 2 пары отличаются
    от строк длиной; при d = 2 различает только число элементов верхнего уровня.
    """
    depth = _depth (value)
    if depth <= 2:
        return False
    if depth >= 4:
        return True
    if d != 2:
        return len (value[0][0]) != 2
    return True if len (value) != 2 else None


def _detect_quantum(raw: Dict[int, Any], d: int) -> bool:
    """
    Raises:
        CertificateFormatError: записи допускают обе формы, а поле 't' не задано
    """
    forms = [_entry_form (value, d) for value in raw.values ()]
    if any (form is True for form in forms):
        return True
    if not forms or any (form is False for form in forms):
        return False
    raise CertificateFormatError (
        "Форма сертификата неоднозначна при d = 2: укажите поле 't' или 'kind'")


def write_certificate(cert: Union[PackingCertificate, QuantumCertificate]) -> Dict[str, Any]:
    """Сертификат в JSON; комплексные элементы - пары [re, im]"""
    if isinstance (cert, QuantumCertificate):
        vertices = sorted ({u for u, _ in cert.projectors})
        projectors = {
            str (u): [matrix_to_json (cert.projectors[(u, i)]) for i in range (cert.t)]
            for u in vertices
        }
        return {"kind": KIND_QUANTUM, "d": cert.d, "k": cert.k, "t": cert.t, "projectors": projectors}
    projectors = {str (u): matrix_to_json (m) for u, m in sorted (cert.projectors.items ())}
    return {"kind": KIND_PACKING, "d": cert.d, "k": cert.k, "projectors": projectors}
