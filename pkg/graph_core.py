"""
Модуль графов для SpectralIndep

Представление простого неориентированного графа с вершинами 0..n-1,
форматы graph6 и JSON списка рёбер, каталог именованных графов,
матрица расстояний и степень графа по расстояниям G^[k].
"""

import os
import json
import itertools
from typing import List, Dict, Optional, Any, Tuple, FrozenSet, Union

import numpy as np
import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.sparse.csgraph import shortest_path

from models import GraphParseError, CatalogError, ContractViolationError
from utils import get_logger

logger = get_logger ('graph_core')

GRAPH6_HEADER = '>>graph6<<'
GRAPH6_MIN = 63
GRAPH6_MAX = 126
PALEY_MAX_Q = 101

Edge = Tuple[int, int]


class Graph (BaseModel):
    """
    Простой неориентированный граф: вершины 0..n-1, рёбра - неупорядоченные пары (u < v)
    """
    model_config = ConfigDict (frozen=True)

    n: int = Field (..., ge=1, description="Число вершин")
    edges: FrozenSet[Edge] = frozenset ()

    @model_validator (mode='before')
    @classmethod
    def _normalize_edges(cls, data: Any) -> Any:
        if not isinstance (data, dict):
            return data
        n = data.get ('n')
        raw = list (data.get ('edges', ()))
        normalized = set ()
        for edge in raw:
            u, v = (int (x) for x in edge)
            if u == v:
                raise ValueError (f"Петля в вершине {u}")
            if isinstance (n, int) and not (0 <= u < n and 0 <= v < n):
                raise ValueError (f"Ребро ({u}, {v}) вне диапазона 0..{n - 1}")
            key = (min (u, v), max (u, v))
            if key in normalized:
                raise ValueError (f"Повторное ребро ({u}, {v})")
            normalized.add (key)
        return {**data, 'edges': frozenset (normalized)}

    @classmethod
    def from_edges(cls, n: int, edges: Any = ()) -> 'Graph':
        return cls (n=n, edges=list (edges))

    @property
    def m(self) -> int:
        return len (self.edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted (self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class CatalogId (BaseModel):
    """Семейство каталога и его целые параметры"""
    model_config = ConfigDict (frozen=True)

    family: str
    params: Tuple[int, ...] = ()

    def __str__(self):
        if not self.params:
            return self.family
        return f"{self.family}:{','.join (str (p) for p in self.params)}"


# Матрицы и простые инварианты
def adjacency_matrix(g: Graph) -> np.ndarray:
    """Матрица смежности 0/1 с нулевой диагональю (int64)"""
    a = np.zeros ((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = 1
        a[v, u] = 1
    return a


def degrees(g: Graph) -> List[int]:
    """Степени вершин"""
    result = [0] * g.n
    for u, v in g.edges:
        result[u] += 1
        result[v] += 1
    return result


def is_regular(g: Graph) -> bool:
    return len (set (degrees (g))) == 1


def neighbors(g: Graph) -> List[List[int]]:
    """Списки соседей, отсортированные по возрастанию"""
    result = [[] for _ in range (g.n)]
    for u, v in g.sorted_edges ():
        result[u].append (v)
        result[v].append (u)
    return [sorted (r) for r in result]


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph ()
    graph.add_nodes_from (range (g.n))
    graph.add_edges_from (g.sorted_edges ())
    return graph


def from_networkx(graph: nx.Graph, ordering: str = 'sorted') -> Graph:
    """Преобразует граф networkx, перенумеровывая вершины в 0..n-1"""
    graph = nx.convert_node_labels_to_integers (graph, ordering=ordering)
    return Graph.from_edges (graph.number_of_nodes (), graph.edges ())


def connected_components(g: Graph) -> List[List[int]]:
    """Компоненты связности, каждая отсортирована, в порядке наименьшей вершины"""
    components = [sorted (c) for c in nx.connected_components (to_networkx (g))]
    return sorted (components)


def girth(g: Graph) -> float:
    """Обхват; inf для леса"""
    return nx.girth (to_networkx (g))


# Расстояния
def distance_matrix(g: Graph) -> np.ndarray:
    """
    Матрица кратчайших расстояний (BFS)

    Args:
        g: граф

    Returns:
        np.ndarray: float-матрица; np.inf для недостижимых пар
    """
    return shortest_path (adjacency_matrix (g), method='D', directed=False, unweighted=True)


def diameter(g: Graph) -> int:
    """Наибольшее конечное расстояние (по всем компонентам)"""
    dist = distance_matrix (g)
    finite = dist[np.isfinite (dist)]
    return int (finite.max ()) if finite.size else 0


def power_graph(g: Graph, k: int) -> Graph:
    """
    Граф G^[k]: смежны все пары на расстоянии от 1 до k

    Args:
        g: граф
        k: параметр расстояния, k >= 1

    Returns:
        Graph: степень графа по расстояниям
    """
    if k < 1:
        raise ContractViolationError (f"k должно быть >= 1, получено {k}")
    if k == 1:
        return g
    dist = distance_matrix (g)
    rows, cols = np.nonzero ((dist >= 1) & (dist <= k))
    return Graph.from_edges (g.n, ((int (u), int (v)) for u, v in zip (rows, cols) if u < v))


# Формат graph6
def parse_graph6(text: Union[str, bytes]) -> Graph:
    """
    Разбирает строку graph6 (короткий и длинный заголовок числа вершин)

    Args:
        text: строка graph6, возможно с префиксом >>graph6<< и переводом строки в конце

    Returns:
        Graph: граф ровно с закодированным множеством рёбер
    """
    if isinstance (text, bytes):
        try:
            text = text.decode ('ascii')
        except UnicodeDecodeError as e:
            raise GraphParseError ("Не-ASCII байт в graph6", e.start) from e

    line = text.rstrip ('\r\n')
    start = len (GRAPH6_HEADER) if line.startswith (GRAPH6_HEADER) else 0
    data = line[start:]
    if not data:
        raise GraphParseError ("Пустая строка graph6", start)

    for i, ch in enumerate (data):
        if not GRAPH6_MIN <= ord (ch) <= GRAPH6_MAX:
            raise GraphParseError (f"Недопустимый символ {ch!r} в graph6", start + i)

    n, body_start = _graph6_size (data, start)
    if n < 1:
        raise GraphParseError ("Граф должен содержать хотя бы одну вершину", start)

    bit_count = n * (n - 1) // 2
    body_len = (bit_count + 5) // 6
    body = data[body_start:]
    if len (body) < body_len:
        raise GraphParseError (
            f"Слишком короткое тело graph6: {len (body)} байт вместо {body_len}",
            start + len (data))
    if len (body) > body_len:
        raise GraphParseError ("Лишние символы после тела graph6", start + body_start + body_len)

    pad = body_len * 6 - bit_count
    if pad and (ord (body[-1]) - GRAPH6_MIN) & ((1 << pad) - 1):
        raise GraphParseError ("Ненулевые биты дополнения", start + body_start + body_len - 1)

    graph = nx.from_graph6_bytes (data.encode ('ascii'))
    return Graph.from_edges (n, graph.edges ())


def _graph6_size(data: str, start: int) -> Tuple[int, int]:
    """Число вершин N(n) и смещение начала тела"""
    values = [ord (ch) - GRAPH6_MIN for ch in data]
    if values[0] < 63:
        return values[0], 1
    if len (values) >= 2 and values[1] == 63:
        if len (values) < 8:
            raise GraphParseError ("Обрезанный 36-битный заголовок graph6", start + len (data))
        n = 0
        for value in values[2:8]:
            n = (n << 6) | value
        return n, 8
    if len (values) < 4:
        raise GraphParseError ("Обрезанный 18-битный заголовок graph6", start + len (data))
    n = 0
    for value in values[1:4]:
        n = (n << 6) | value
    return n, 4


def write_graph6(g: Graph) -> str:
    """Каноническая строка graph6 без заголовка и перевода строки"""
    return nx.to_graph6_bytes (to_networkx (g), header=False).decode ('ascii').strip ()


# Формат JSON списка рёбер
def parse_edge_list_json(data: Union[str, Dict[str, Any]]) -> Graph:
    """
    Разбирает граф в формате {"n": int, "edges": [[u, v], ...]}
    """
    if isinstance (data, str):
        try:
            data = json.loads (data)
        except json.JSONDecodeError as e:
            raise GraphParseError (f"Некорректный JSON: {e.msg}", e.pos) from e

    if not isinstance (data, dict) or 'n' not in data:
        raise GraphParseError ("Ожидался объект с полями n и edges")
    n = data['n']
    edges = data.get ('edges', [])
    if not isinstance (n, int) or isinstance (n, bool) or n < 1:
        raise GraphParseError (f"n должно быть положительным целым, получено {n!r}")
    if not isinstance (edges, list):
        raise GraphParseError ("edges должно быть списком пар")
    for i, edge in enumerate (edges):
        if (not isinstance (edge, list) or len (edge) != 2
                or not all (isinstance (x, int) and not isinstance (x, bool) for x in edge)):
            raise GraphParseError (f"Ребро #{i} должно быть парой целых чисел")
    try:
        return Graph.from_edges (n, edges)
    except ValueError as e:
        raise GraphParseError (f"Недопустимый граф: {e}") from e


def write_edge_list_json(g: Graph) -> Dict[str, Any]:
    return {"n": g.n, "edges": [list (e) for e in g.sorted_edges ()]}


def parse_graph_line(line: str) -> Graph:
    """Строка файла графов: JSON объект или graph6"""
    stripped = line.strip ()
    if stripped.startswith ('{'):
        return parse_edge_list_json (stripped)
    return parse_graph6 (stripped)


def read_graphs(path: str) -> List[Tuple[str, Graph]]:
    """
    Читает файл графов (по одному на строку; graph6 и JSON можно смешивать)

    Args:
        path: путь к файлу

    Returns:
        List[Tuple[str, Graph]]: пары (идентификатор "<имя>:<строка>", граф)
    """
    stem = os.path.splitext (os.path.basename (path))[0]
    result = []
    with open (path, 'r', encoding='ascii', errors='strict') as file:
        for number, line in enumerate (file, start=1):
            if not line.strip () or line.lstrip ().startswith ('#'):
                continue
            try:
                result.append ((f"{stem}:{number}", parse_graph_line (line)))
            except GraphParseError as e:
                raise GraphParseError (f"{path}, строка {number}: {e}") from e
    return result


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Граф Эрдёша–Реньи G(n, p), детерминированный по seed"""
    return from_networkx (nx.gnp_random_graph (n, p, seed=seed))


# Каталог именованных графов
def parse_catalog_id(text: str) -> CatalogId:
    """Разбирает идентификатор вида 'family:p1,p2'"""
    family, _, rest = text.strip ().partition (':')
    family = family.strip ().lower ()
    if not family:
        raise CatalogError (f"Пустое семейство в идентификаторе {text!r}")
    try:
        params = tuple (int (p) for p in rest.split (',') if p.strip () != '')
    except ValueError as e:
        raise CatalogError (f"Параметры каталога должны быть целыми: {text!r}") from e
    return CatalogId (family=family, params=params)


def catalog(cid: Union[CatalogId, str]) -> Graph:
    """
    Строит граф каталога

    Args:
        cid: идентификатор каталога или строка 'family:params'

    Returns:
        Graph: граф, соответствующий определению семейства
    """
    if isinstance (cid, str):
        cid = parse_catalog_id (cid)

    if cid.family in _NAMED:
        _expect_params (cid, 0)
        g = from_networkx (_NAMED[cid.family] (), ordering='default')
    elif cid.family in _FAMILIES:
        builder, arity = _FAMILIES[cid.family]
        _expect_params (cid, arity)
        g = builder (*cid.params)
    else:
        raise CatalogError (f"Неизвестное семейство каталога: {cid.family}")

    _check_degrees (cid, g)
    logger.debug (f"Каталог {cid}: n={g.n}, m={g.m}")
    return g


def catalog_families() -> List[str]:
    return sorted (list (_FAMILIES) + list (_NAMED))


def _expect_params(cid: CatalogId, arity: Optional[int]) -> None:
    if arity is None:
        if not cid.params:
            raise CatalogError (f"{cid.family}: нужен хотя бы один параметр")
        return
    if len (cid.params) != arity:
        raise CatalogError (f"{cid.family}: ожидалось параметров {arity}, получено {len (cid.params)}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CatalogError (message)


def _cycle(n: int) -> Graph:
    _require (n >= 3, f"cycle: n >= 3, получено {n}")
    return Graph.from_edges (n, ((i, (i + 1) % n) for i in range (n)))


def _path(n: int) -> Graph:
    _require (n >= 1, f"path: n >= 1, получено {n}")
    return Graph.from_edges (n, ((i, i + 1) for i in range (n - 1)))


def _complete(n: int) -> Graph:
    _require (n >= 1, f"complete: n >= 1, получено {n}")
    return Graph.from_edges (n, itertools.combinations (range (n), 2))


def _empty(n: int) -> Graph:
    _require (n >= 1, f"empty: n >= 1, получено {n}")
    return Graph (n=n)


def _star(leaves: int) -> Graph:
    return _complete_multipartite (1, leaves)


def _complete_bipartite(a: int, b: int) -> Graph:
    return _complete_multipartite (a, b)


def _complete_multipartite(*parts: int) -> Graph:
    _require (all (p >= 1 for p in parts), f"Размеры долей должны быть >= 1: {parts}")
    labels = [i for i, size in enumerate (parts) for _ in range (size)]
    n = len (labels)
    edges = [(u, v) for u, v in itertools.combinations (range (n), 2) if labels[u] != labels[v]]
    return Graph.from_edges (n, edges)


def _kneser(n: int, k: int) -> Graph:
    _require (k >= 1 and n >= 2 * k, f"kneser: нужно k >= 1 и n >= 2k, получено ({n}, {k})")
    subsets = [frozenset (s) for s in itertools.combinations (range (n), k)]
    _require (len (subsets) <= 5000, f"kneser({n}, {k}): слишком много вершин ({len (subsets)})")
    edges = [(i, j) for i, j in itertools.combinations (range (len (subsets)), 2)
             if not subsets[i] & subsets[j]]
    return Graph.from_edges (len (subsets), edges)


def _hypercube(d: int) -> Graph:
    _require (1 <= d <= 12, f"hypercube: 1 <= d <= 12, получено {d}")
    return from_networkx (nx.hypercube_graph (d))


def _folded_cube(d: int) -> Graph:
    """Q_(d-1) плюс паросочетание антиподальных вершин"""
    _require (3 <= d <= 13, f"folded_cube: 3 <= d <= 13, получено {d}")
    n = 1 << (d - 1)
    full = n - 1
    edges = set ()
    for x in range (n):
        for bit in range (d - 1):
            y = x ^ (1 << bit)
            edges.add ((min (x, y), max (x, y)))
        y = x ^ full
        edges.add ((min (x, y), max (x, y)))
    return Graph.from_edges (n, edges)


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all (q % p for p in range (2, int (q ** 0.5) + 1))


def _paley(q: int) -> Graph:
    _require (_is_prime (q), f"paley: поддерживаются только простые q, получено {q}")
    _require (q % 4 == 1, f"paley: q должно быть = 1 mod 4, получено {q}")
    _require (q <= PALEY_MAX_Q, f"paley: q <= {PALEY_MAX_Q}, получено {q}")
    residues = {(x * x) % q for x in range (1, q)}
    edges = [(u, v) for u, v in itertools.combinations (range (q), 2) if (v - u) % q in residues]
    return Graph.from_edges (q, edges)


def _andrasfai(k: int) -> Graph:
    """Циркулянт на 3k-1 вершинах с разностями = 1 mod 3"""
    _require (k >= 1, f"andrasfai: k >= 1, получено {k}")
    n = 3 * k - 1
    edges = [(u, v) for u, v in itertools.combinations (range (n), 2) if (v - u) % 3 == 1]
    return Graph.from_edges (n, edges)


def _shrikhande() -> nx.Graph:
    """Граф Кэли группы Z4 x Z4 с образующими ±(1,0), ±(0,1), ±(1,1)"""
    steps = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]
    graph = nx.Graph ()
    for a, b in itertools.product (range (4), repeat=2):
        graph.add_node (4 * a + b)
        for da, db in steps:
            graph.add_edge (4 * a + b, 4 * ((a + da) % 4) + (b + db) % 4)
    return graph


def _rook_line() -> nx.Graph:
    """Рёберный граф K3 □ K3"""
    square = nx.cartesian_product (nx.complete_graph (3), nx.complete_graph (3))
    return nx.convert_node_labels_to_integers (nx.line_graph (square), ordering='sorted')


def _cuboctahedral() -> nx.Graph:
    """Рёберный граф куба Q3"""
    return nx.convert_node_labels_to_integers (nx.line_graph (nx.hypercube_graph (3)), ordering='sorted')


_FAMILIES = {
    'cycle': (_cycle, 1),
    'path': (_path, 1),
    'complete': (_complete, 1),
    'empty': (_empty, 1),
    'star': (_star, 1),
    'complete_bipartite': (_complete_bipartite, 2),
    'complete_multipartite': (_complete_multipartite, None),
    'kneser': (_kneser, 2),
    'hypercube': (_hypercube, 1),
    'folded_cube': (_folded_cube, 1),
    'paley': (_paley, 1),
    'andrasfai': (_andrasfai, 1),
}

_NAMED = {
    'petersen': nx.petersen_graph,
    'clebsch': lambda: to_networkx (_folded_cube (5)),
    'shrikhande': _shrikhande,
    'hoffman_singleton': nx.hoffman_singleton_graph,
    'heawood': nx.heawood_graph,
    'desargues': nx.desargues_graph,
    'dodecahedral': nx.dodecahedral_graph,
    'octahedral': nx.octahedral_graph,
    'frucht': nx.frucht_graph,
    'pappus': nx.pappus_graph,
    'chvatal': nx.chvatal_graph,
    'grotzsch': lambda: nx.mycielski_graph (4),
    'rook_line': _rook_line,
    'cuboctahedral': _cuboctahedral,
}

# Степени регулярных семейств: функция параметров -> степень
_REGULAR_DEGREE = {
    'cycle': lambda n: 2,
    'complete': lambda n: n - 1,
    'empty': lambda n: 0,
    'hypercube': lambda d: d,
    'folded_cube': lambda d: d,
    'paley': lambda q: (q - 1) // 2,
    'andrasfai': lambda k: k,
    'petersen': lambda: 3,
    'clebsch': lambda: 5,
    'shrikhande': lambda: 6,
    'hoffman_singleton': lambda: 7,
    'heawood': lambda: 3,
    'desargues': lambda: 3,
    'dodecahedral': lambda: 3,
    'octahedral': lambda: 4,
    'frucht': lambda: 3,
    'pappus': lambda: 3,
    'chvatal': lambda: 4,
    'rook_line': lambda: 6,
    'cuboctahedral': lambda: 4,
}


def _check_degrees(cid: CatalogId, g: Graph) -> None:
    """Проверка степеней построенного графа по определению семейства"""
    deg = degrees (g)
    if cid.family in _REGULAR_DEGREE:
        expected = _REGULAR_DEGREE[cid.family] (*cid.params)
        if any (d != expected for d in deg):
            raise ContractViolationError (f"{cid}: граф не {expected}-регулярен")
    elif cid.family == 'kneser':
        n, k = cid.params
        expected = len (list (itertools.combinations (range (n - k), k)))
        if any (d != expected for d in deg):
            raise ContractViolationError (f"{cid}: граф не {expected}-регулярен")
    elif cid.family == 'path' and g.n > 1:
        if sorted (deg)[:2] != [1, 1] or max (deg) > 2:
            raise ContractViolationError (f"{cid}: неверные степени пути")


# Графы, на которых инерционная граница равна alpha (сверяется сканированием каталога)
INERTIA_TIGHT_CATALOG = [
    'cycle:5', 'cycle:7', 'cycle:9', 'cycle:11', 'cycle:13',
    'path:2', 'path:3', 'path:4', 'path:5', 'path:6', 'path:7', 'path:8',
    'complete:5', 'star:4', 'complete_multipartite:3,1,1',
    'petersen', 'kneser:5,2', 'kneser:6,2', 'kneser:7,2',
    'andrasfai:2', 'andrasfai:3', 'andrasfai:4',
    'heawood', 'desargues', 'clebsch', 'folded_cube:3', 'folded_cube:5', 'grotzsch',
]

# Граница Хоффмана точна, инерционная - нет
HOFFMAN_TIGHT_NOT_INERTIA = ['shrikhande', 'hypercube:4', 'cuboctahedral']
