"""
Основная логика приложения SpectralIndep

Команды bound, exact, verify, weights и scan: разрешение входных графов,
обработка графов пулом потоков и сборка отчёта о запуске.
"""

import json
import time
from dataclasses import dataclass
from typing import List, Dict, Any, Optional, Tuple, Callable

import numpy as np

from models import (
    RunReport, GraphRun, ZeroPolicy, BudgetExceededError, AssertionFailure,
    SpectralIndepError, InputError, CertificateFormatError, ContractViolationError
)
from config import AppConfig, TOOL_VERSION, resolve_threads
from graph_core import (
    Graph, catalog, parse_catalog_id, read_graphs, parse_edge_list_json, random_graph,
    INERTIA_TIGHT_CATALOG, HOFFMAN_TIGHT_NOT_INERTIA
)
from bounds import Polynomial, bound_chain, poly_spectral_bound, report_to_json
from exact_oracle import alpha_k_exact, alpha_naive, verify_independent_set, load_independent_set
from packing_cert import PackingCertificate, load_certificate, verify_packing, verify_quantum_cert
from weight_search import search_tight_weights
from utils import get_logger, run_pool

logger = get_logger ('core')

# Константы сканирования
SCAN_EDGE_PROBABILITIES = (0.2, 0.5, 0.8)
SCAN_RANDOM_POLYNOMIALS = 5
SCAN_COEFFICIENT_RANGE = 3

# Команды
CMD_BOUND = "bound"
CMD_EXACT = "exact"
CMD_VERIFY = "verify"
CMD_WEIGHTS = "weights"
CMD_SCAN = "scan"


@dataclass
class RunContext:
    """Параметры запуска, общие для всех команд"""
    config: AppConfig
    policy: Optional[ZeroPolicy] = None  # None - точный режим для целочисленных матриц
    strict: bool = False
    timing: bool = False

    @property
    def threads(self) -> int:
        return resolve_threads (self.config)

    @property
    def budget(self) -> int:
        return self.config.oracle_budget


# Входные графы
def load_inputs(catalog_ids: Optional[List[str]] = None, graph_file: Optional[str] = None,
                edges_file: Optional[str] = None) -> Tuple[str, List[Tuple[str, Graph]]]:
    """
    Собирает входные графы из каталога, файла graph6 и файла JSON списка рёбер

    Returns:
        Tuple[str, List[Tuple[str, Graph]]]: описание входа и пары (идентификатор, граф)
    """
    items = []
    described = []
    for text in catalog_ids or []:
        cid = parse_catalog_id (text)
        items.append ((str (cid), catalog (cid)))
        described.append (f"catalog:{cid}")
    if graph_file:
        try:
            items.extend (read_graphs (graph_file))
        except OSError as e:
            raise InputError (f"Не удалось прочитать {graph_file}: {e}") from e
        described.append (graph_file)
    if edges_file:
        try:
            with open (edges_file, 'r', encoding='utf-8') as file:
                items.append ((edges_file, parse_edge_list_json (file.read ())))
        except OSError as e:
            raise InputError (f"Не удалось прочитать {edges_file}: {e}") from e
        described.append (edges_file)
    if not items:
        raise InputError ("Не задан ни один входной граф (--catalog, --graph6 или --edges)")
    return ",".join (described), items


def _process(ctx: RunContext, items: List[Tuple[str, Graph]],
             func: Callable[[str, Graph], GraphRun]) -> List[GraphRun]:
    """
    Обрабатывает графы пулом потоков; порядок результатов совпадает с порядком входа

    Ошибки приложения фиксируются в GraphRun.error и не прерывают остальные графы.
    """
    def run(item: Tuple[str, Graph]) -> GraphRun:
        graph_id, g = item
        started = time.perf_counter ()
        try:
            result = func (graph_id, g)
        except SpectralIndepError as e:
            logger.warning (f"{graph_id}: {type (e).__name__}: {e}")
            result = GraphRun (graph=graph_id, n=g.n, m=g.m, error=e.to_dict ())
        if ctx.timing:
            result.timing = time.perf_counter () - started
        return result

    return run_pool (run, items, ctx.threads)


def _report(command: str, input_desc: str, graphs: List[GraphRun], summary: Dict[str, Any]) -> RunReport:
    summary = {**summary, "graphs": len (graphs), "errors": sum (1 for g in graphs if g.error)}
    return RunReport (tool_version=TOOL_VERSION, command=command, input=input_desc, graphs=graphs, summary=summary)


def _tight_counts(graphs: List[GraphRun]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for run in graphs:
        for entry in run.bounds:
            if entry.get ("tight") and entry["bound"] != 'exact':
                counts[entry["bound"]] = counts.get (entry["bound"], 0) + 1
    return dict (sorted (counts.items ()))


# bound
def cmd_bound(ctx: RunContext, input_desc: str, items: List[Tuple[str, Graph]], k: int = 1,
              poly: Optional[str] = None, grid: bool = False, exact: bool = True) -> RunReport:
    """
    Все применимые границы для каждого графа

    Args:
        ctx: контекст запуска
        input_desc: описание входа
        items: пары (идентификатор, граф)
        k: параметр расстояния
        poly: коэффициенты многочлена 'c0,c1,...,ck' (по умолчанию x^k)
        grid: выбрать многочлен перебором x^k + c x
        exact: вычислять точное alpha_k

    Returns:
        RunReport: отчёт о запуске
    """
    p = Polynomial.parse (poly) if poly else None
    if p is not None and p.degree > k:
        raise ContractViolationError (f"Степень многочлена {p.degree} больше k = {k}")

    def run(graph_id: str, g: Graph) -> GraphRun:
        reports = bound_chain (g, k, ctx.policy, p, graph_id, ctx.budget if exact else None,
                               grid, ctx.config.epsilon)
        exact_value = next ((int (r.value) for r in reports if r.bound == 'exact'), None)
        return GraphRun (graph=graph_id, n=g.n, m=g.m, k=k,
                         bounds=[report_to_json (r) for r in reports], exact=exact_value)

    graphs = _process (ctx, items, run)
    return _report (CMD_BOUND, input_desc, graphs, {"k": k, "tight": _tight_counts (graphs)})


# exact
def cmd_exact(ctx: RunContext, input_desc: str, items: List[Tuple[str, Graph]], k: int = 1,
              cross_check: bool = False) -> RunReport:
    """
    Точное alpha_k и лексикографически наименьший сертификат для каждого графа

    С cross_check графы не больше naive_max_n вершин дополнительно решаются
    полным перебором; расхождение размеров - AssertionFailure.
    """
    limit = ctx.config.naive_max_n

    def run(graph_id: str, g: Graph) -> GraphRun:
        size, cert = alpha_k_exact (g, k, ctx.budget)
        if cross_check and g.n <= limit:
            naive_size = alpha_naive (g, k, limit)[0]
            if naive_size != size:
                raise AssertionFailure (f"{graph_id}: перебор даёт {naive_size}, метод ветвей и границ {size}")
        return GraphRun (graph=graph_id, n=g.n, m=g.m, k=k, exact=size, certificate=cert.to_json ())

    graphs = _process (ctx, items, run)
    summary = {"k": k}
    if cross_check:
        summary["cross_checked"] = sum (1 for run in graphs if not run.error and run.n <= limit)
    return _report (CMD_EXACT, input_desc, graphs, summary)


# verify
def load_certificate_file(path: str) -> Dict[str, Any]:
    """Читает JSON сертификата; ошибки чтения и синтаксиса - CertificateFormatError"""
    try:
        with open (path, 'r', encoding='utf-8') as file:
            data = json.load (file)
    except OSError as e:
        raise CertificateFormatError (f"Не удалось прочитать сертификат {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise CertificateFormatError (f"Некорректный JSON в {path}: {e}") from e
    if not isinstance (data, dict):
        raise CertificateFormatError (f"Сертификат в {path} должен быть объектом")
    return data


def cmd_verify(ctx: RunContext, cert_path: str, input_desc: str, items: List[Tuple[str, Graph]],
               k: Optional[int] = None) -> RunReport:
    """
    Проверяет сертификат (независимое множество, упаковка или квантовый) на одном графе

    Вид сертификата определяется по форме: поле "vertices" - независимое множество,
    иначе упаковка или квантовый сертификат.

    Args:
        ctx: контекст запуска
        cert_path: путь к JSON сертификата
        input_desc: описание входа
        items: ровно один граф
        k: параметр расстояния (по умолчанию из сертификата, иначе 1)

    Returns:
        RunReport: summary.valid - результат проверки
    """
    if len (items) != 1:
        raise InputError (f"Проверка сертификата требует ровно один граф, получено {len (items)}")
    graph_id, g = items[0]
    data = load_certificate_file (cert_path)

    if "vertices" in data:
        cert = load_independent_set ({**data, "k": k or data.get ("k", 1)})
        kind, distance = "independent_set", cert.k
        report = verify_independent_set (g, cert)
    else:
        cert = load_certificate (data)
        distance = k or cert.k or 1
        if isinstance (cert, PackingCertificate):
            kind = "packing"
            report = verify_packing (g, distance, cert, ctx.config.cert_tol, ctx.threads)
        else:
            kind = "quantum"
            report = verify_quantum_cert (g, distance, cert, ctx.config.cert_tol)

    logger.info (f"{graph_id}: сертификат ({kind}) {'корректен' if report.valid else 'некорректен'}")
    run = GraphRun (graph=graph_id, n=g.n, m=g.m, k=distance, verification=report.to_json ())
    return _report (CMD_VERIFY, f"{cert_path}@{input_desc}", [run],
                    {"kind": kind, "valid": report.valid, "conditions": report.conditions ()})


# weights
def cmd_weights(ctx: RunContext, input_desc: str, items: List[Tuple[str, Graph]],
                restarts: Optional[int] = None, iterations: Optional[int] = None,
                field: str = "real", seed: int = 0) -> RunReport:
    """
    Поиск взвешивания H∘A с инерционной границей, равной alpha

    Параметры, не заданные явно, берутся из конфигурации.
    """
    config = ctx.config
    restarts = restarts if restarts is not None else config.search_restarts
    iterations = iterations if iterations is not None else config.search_iterations

    def run(graph_id: str, g: Graph) -> GraphRun:
        result = search_tight_weights (
            g, restarts=restarts, iterations=iterations,
            step_initial=config.step_initial, step_final=config.step_final,
            field=field, seed=seed, policy=ZeroPolicy.tolerance (config.epsilon),
            threads=ctx.threads, budget=ctx.budget, denominator=config.rational_denominator,
        )
        logger.info (f"{graph_id}: граница {result.best_bound}, alpha = {result.target}, tight = {result.tight}")
        return GraphRun (graph=graph_id, n=g.n, m=g.m, k=1, exact=result.target, search=result.model_dump ())

    # Перезапуски уже параллельны внутри поиска, графы идут последовательно
    serial = RunContext (config.model_copy (update={"threads": 1}), ctx.policy, ctx.strict, ctx.timing)
    graphs = _process (serial, items, run)
    tight = sum (1 for g in graphs if g.search and g.search["tight"])
    return _report (CMD_WEIGHTS, input_desc, graphs,
                    {"field": field, "seed": seed, "restarts": restarts, "tight": tight})


# scan
def parse_n_range(text: str) -> Tuple[int, int]:
    """'9' -> (9, 9); '4-9' -> (4, 9)"""
    low, _, high = text.partition ('-')
    try:
        result = (int (low), int (high or low))
    except ValueError as e:
        raise InputError (f"Диапазон числа вершин должен иметь вид 'n' или 'a-b': {text!r}") from e
    if result[0] < 1 or result[0] > result[1]:
        raise InputError (f"Некорректный диапазон числа вершин: {text!r}")
    return result


def scan_corpus(n_range: Tuple[int, int], count: int, seed: int) -> List[Tuple[str, Graph, np.random.SeedSequence]]:
    """
    Случайный корпус G(n, p): n из диапазона, p из SCAN_EDGE_PROBABILITIES

    Каждый граф получает собственную SeedSequence, поэтому корпус не зависит от числа потоков.
    """
    corpus = []
    for i, child in enumerate (np.random.SeedSequence (seed).spawn (count)):
        rng = np.random.default_rng (child)
        n = int (rng.integers (n_range[0], n_range[1] + 1))
        p = float (rng.choice (SCAN_EDGE_PROBABILITIES))
        graph_seed = int (rng.integers (2 ** 31))
        corpus.append ((f"random:{i}", random_graph (n, p, graph_seed), child))
    return corpus


def scan_polynomials(k: int, rng: np.random.Generator) -> List[Polynomial]:
    """x^k + x и SCAN_RANDOM_POLYNOMIALS случайных целочисленных многочленов степени не выше k"""
    result = [Polynomial (tuple ([0, 1] + [0] * (k - 2) + [1])) if k >= 2 else Polynomial ((0, 2))]
    while len (result) < SCAN_RANDOM_POLYNOMIALS + 1:
        coefficients = rng.integers (-SCAN_COEFFICIENT_RANGE, SCAN_COEFFICIENT_RANGE + 1, size=k + 1)
        p = Polynomial (tuple (int (c) for c in coefficients))
        if p.degree >= 1:
            result.append (p)
    return result


def cmd_scan(ctx: RunContext, n_text: str = "4-9", count: int = 100, seed: int = 0,
             ks: Optional[List[int]] = None, catalog_only: bool = False) -> RunReport:
    """
    Проверка неравенства alpha_k <= граница на корпусе графов

    Для каждого графа и k вычисляются точное alpha_k, все границы bound_chain и
    полиномиальные границы для x^k + x и случайных многочленов. Любое
    alpha_k > floor(границы) - нарушение. В режиме catalog_only вместо случайного
    корпуса берутся графы каталога и сверяются флаги точности.

    Returns:
        RunReport: summary с нарушениями и частотой точности
    """
    ks = ks or [1]
    if any (k < 1 for k in ks):
        raise InputError (f"Все k должны быть >= 1: {ks}")

    expectations: Dict[str, Dict[str, bool]] = {}
    if catalog_only:
        corpus = []
        for i, text in enumerate (INERTIA_TIGHT_CATALOG + HOFFMAN_TIGHT_NOT_INERTIA):
            corpus.append ((text, catalog (text), np.random.SeedSequence ([seed, i])))
        for text in INERTIA_TIGHT_CATALOG:
            expectations[text] = {"inertia": True}
        for text in HOFFMAN_TIGHT_NOT_INERTIA:
            expectations[text] = {"inertia": False, "hoffman": True}
        input_desc = f"scan:catalog,k={','.join (map (str, ks))}"
    else:
        n_range = parse_n_range (n_text)
        corpus = scan_corpus (n_range, count, seed)
        input_desc = f"scan:n={n_text},count={count},seed={seed},k={','.join (map (str, ks))}"

    sequences = {graph_id: child for graph_id, _, child in corpus}

    def run(graph_id: str, g: Graph) -> GraphRun:
        rng = np.random.default_rng (sequences[graph_id])
        bounds = []
        for k in ks:
            reports = bound_chain (g, k, ctx.policy, None, graph_id, ctx.budget, False, ctx.config.epsilon)
            exact = next ((int (r.value) for r in reports if r.bound == 'exact'), None)
            if exact is None:
                raise BudgetExceededError (f"{graph_id}: сканирование требует точного alpha_{k}")
            for p in scan_polynomials (k, rng):
                extra = poly_spectral_bound (g, p, ZeroPolicy.tolerance (ctx.config.epsilon), graph_id, k)
                extra.tight = extra.floor == exact
                reports.insert (-1, extra)
            bounds.extend (report_to_json (r) for r in reports)
        return GraphRun (graph=graph_id, n=g.n, m=g.m, bounds=bounds)

    graphs = _process (ctx, [(graph_id, g) for graph_id, g, _ in corpus], run)
    violations, mismatches = _scan_findings (graphs, expectations)
    pairs = len (graphs) * len (ks)
    tight = _tight_counts (graphs)
    summary = {
        "pairs": pairs,
        "violations": violations,
        "violation_count": len (violations),
        "tightness_mismatches": mismatches,
        "tight_frequency": {name: count_ / pairs for name, count_ in tight.items ()} if pairs else {},
    }
    return _report (CMD_SCAN, input_desc, graphs, summary)


def _scan_findings(graphs: List[GraphRun],
                   expectations: Dict[str, Dict[str, bool]]) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    """Нарушения alpha_k <= floor(граница) и расхождения с ожидаемой точностью"""
    violations = []
    mismatches = []
    for run in graphs:
        exact_by_k = {b["k"]: b["value"] for b in run.bounds if b["bound"] == 'exact'}
        for entry in run.bounds:
            exact = exact_by_k.get (entry["k"])
            if exact is not None and entry["floor"] < exact:
                violations.append ({"graph": run.graph, "k": entry["k"], "bound": entry["bound"],
                                    "value": entry["value"], "exact": exact})
            expected = expectations.get (run.graph, {}).get (entry["bound"])
            if expected is not None and entry["k"] == 1 and entry["tight"] != expected:
                mismatches.append ({"graph": run.graph, "bound": entry["bound"],
                                    "expected": expected, "tight": entry["tight"]})
    for violation in violations:
        logger.error (f"Нарушение границы: {violation}")
    return violations, mismatches


# Код завершения и плоская таблица
def exit_code_for(report: RunReport, strict: bool = False) -> int:
    """
    0 - успех; 1 - некорректный сертификат или нарушение; иначе код первой ошибки графа при --strict
    """
    if report.command == CMD_VERIFY and not report.summary.get ("valid", False):
        return 1
    if report.command == CMD_SCAN and (report.summary.get ("violation_count")
                                       or report.summary.get ("tightness_mismatches")):
        return 1
    if strict:
        failed = next ((g for g in report.graphs if g.error), None)
        if failed is not None:
            return int (failed.error.get ("exit_code", 2))
    return 0


def report_rows(report: RunReport) -> List[Dict[str, Any]]:
    """Строки CSV: одна строка на границу, одна строка на ошибку графа"""
    rows = []
    for run in report.graphs:
        if run.error:
            rows.append ({"graph": run.graph, "k": run.k, "error": run.error["message"]})
            continue
        if not run.bounds and run.exact is not None:
            rows.append ({"graph": run.graph, "k": run.k, "bound": "exact", "value": run.exact,
                          "floor": run.exact, "exact": run.exact})
        for entry in run.bounds:
            counts = entry.get ("counts") or {}
            rows.append ({
                "graph": run.graph, "k": entry["k"], "bound": entry["bound"], "value": entry["value"],
                "floor": entry["floor"], "ge_w": counts.get ("ge_w"), "le_W": counts.get ("le_W"),
                "tight": entry["tight"], "exact": run.exact,
            })
    return rows
