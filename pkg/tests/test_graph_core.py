"""
Тесты модуля graph_core: формат graph6, JSON список рёбер, каталог, расстояния
"""

import os
import math

import numpy as np
import pytest

from models import GraphParseError, CatalogError
from graph_core import (
    Graph, parse_graph6, write_graph6, parse_edge_list_json, write_edge_list_json,
    read_graphs, catalog, catalog_families, parse_catalog_id, distance_matrix, power_graph,
    adjacency_matrix, degrees, is_regular, girth, diameter, connected_components, random_graph,
    to_networkx, from_networkx, INERTIA_TIGHT_CATALOG, HOFFMAN_TIGHT_NOT_INERTIA
)


class TestGraph:
    def test_edges_are_normalized(self):
        g = Graph.from_edges (3, [(2, 0), (1, 2)])
        assert g.edges == frozenset ({(0, 2), (1, 2)})
        assert g.m == 2

    @pytest.mark.parametrize ("edges", [[(0, 0)], [(0, 3)], [(0, 1), (1, 0)]])
    def test_invalid_edges_rejected(self, edges):
        with pytest.raises (ValueError):
            Graph.from_edges (3, edges)

    def test_adjacency_is_symmetric_with_zero_diagonal(self, petersen):
        a = adjacency_matrix (petersen)
        assert (a == a.T).all ()
        assert not np.diagonal (a).any ()
        assert set (np.unique (a)) <= {0, 1}


class TestGraph6:
    def test_star_decodes(self):
        g = parse_graph6 ("D?{")
        assert g.n == 5
        assert g.edges == frozenset ({(0, 4), (1, 4), (2, 4), (3, 4)})
        assert write_graph6 (g) == "D?{"

    def test_single_vertex(self):
        assert parse_graph6 ("@") == Graph (n=1)
        assert write_graph6 (Graph (n=1)) == "@"

    def test_triangle(self):
        assert write_graph6 (catalog ('complete:3')) == "Bw"
        assert parse_graph6 ("Bw").m == 3

    def test_petersen(self):
        g = parse_graph6 ("IsP@PGXD_")
        assert (g.n, g.m) == (10, 15)
        assert set (degrees (g)) == {3}
        assert girth (g) == 5

    def test_header_and_newline_accepted(self):
        assert parse_graph6 (">>graph6<<Bw\n").m == 3
        assert parse_graph6 (b"Bw").m == 3

    def test_long_header(self):
        g = catalog ('cycle:70')
        text = write_graph6 (g)
        assert text.startswith ('~')
        assert parse_graph6 (text) == g

    @pytest.mark.parametrize ("text, offset", [
        ("B w", 1),  # пробел вне диапазона 63..126
        ("Bww", 2),  # лишний символ после тела
        ("Bx", 1),  # ненулевые биты дополнения
        ("D?", 2),  # тело слишком короткое
    ])
    def test_malformed_names_offset(self, text, offset):
        with pytest.raises (GraphParseError) as info:
            parse_graph6 (text)
        assert info.value.offset == offset

    def test_empty_line(self):
        with pytest.raises (GraphParseError):
            parse_graph6 ("")

    def test_round_trip_small_graphs(self, small_corpus):
        for g in small_corpus:
            assert parse_graph6 (write_graph6 (g)) == g

    def test_round_trip_catalog(self):
        for name in ['petersen', 'heawood', 'clebsch', 'kneser:6,2', 'paley:13', 'folded_cube:5']:
            g = catalog (name)
            assert parse_graph6 (write_graph6 (g)) == g


class TestEdgeListJson:
    def test_parse_and_write(self):
        g = parse_edge_list_json ('{"n": 3, "edges": [[0, 1], [2, 1]]}')
        assert write_edge_list_json (g) == {"n": 3, "edges": [[0, 1], [1, 2]]}

    @pytest.mark.parametrize ("text", [
        '{"n": 0, "edges": []}',
        '{"n": 3, "edges": [[0, 0]]}',
        '{"n": 3, "edges": [[0, 5]]}',
        '{"n": 3, "edges": [[0, 1, 2]]}',
        '{"edges": []}',
        '[1, 2]',
        '{"n": 3,',
    ])
    def test_invalid(self, text):
        with pytest.raises (GraphParseError):
            parse_edge_list_json (text)


def test_read_graphs_mixed_file(fixtures_dir):
    graphs = read_graphs (os.path.join (fixtures_dir, 'named.g6'))
    assert [graph_id for graph_id, _ in graphs] == ["named:2", "named:3", "named:4"]
    assert [g.m for _, g in graphs] == [15, 3, 3]


def test_higman_sims_fixture(fixtures_dir):
    [(graph_id, g)] = read_graphs (os.path.join (fixtures_dir, 'higman_sims.g6'))
    assert graph_id == "higman_sims:2"
    assert (g.n, g.m) == (100, 1100)
    assert set (degrees (g)) == {22}
    assert girth (g) == 4


def test_read_graphs_reports_line(tmp_path):
    path = tmp_path / "bad.g6"
    path.write_text ("Bw\nB w\n")
    with pytest.raises (GraphParseError, match="строка 2"):
        read_graphs (str (path))


class TestCatalog:
    def test_cycle(self):
        g = catalog ('cycle:5')
        assert (g.n, g.m) == (5, 5)
        assert set (degrees (g)) == {2}

    def test_petersen_matches_kneser(self):
        p, k = catalog ('petersen'), catalog ('kneser:5,2')
        for g in (p, k):
            assert (g.n, g.m, girth (g)) == (10, 15, 5)
            assert set (degrees (g)) == {3}

    def test_complete_bipartite(self):
        g = catalog ('complete_bipartite:3,3')
        assert g.m == 9
        sides = nx_bipartition (g)
        assert sorted (len (s) for s in sides) == [3, 3]

    def test_clebsch_is_folded_cube(self):
        g = catalog ('clebsch')
        assert (g.n, g.m) == (16, 40)
        assert girth (g) == 4

    @pytest.mark.parametrize ("text", [
        'cycle:2', 'paley:7', 'paley:9', 'paley:109', 'kneser:3,2', 'unknown', 'cycle', 'petersen:3',
        'hypercube:0', 'cycle:x',
    ])
    def test_invalid_parameters(self, text):
        with pytest.raises (CatalogError):
            catalog (text)

    def test_catalog_id_syntax(self):
        cid = parse_catalog_id ('Complete_Bipartite:3, 4')
        assert (cid.family, cid.params) == ('complete_bipartite', (3, 4))
        assert str (cid) == 'complete_bipartite:3,4'

    def test_every_named_graph_builds(self):
        for family in catalog_families ():
            if family in ('cycle', 'path', 'complete', 'empty', 'star', 'complete_bipartite',
                          'complete_multipartite', 'kneser', 'hypercube', 'folded_cube', 'paley', 'andrasfai'):
                continue
            assert catalog (family).n >= 1

    def test_cuboctahedral_is_line_graph_of_cube(self):
        g = catalog ('cuboctahedral')
        assert (g.n, g.m) == (12, 24)
        assert set (degrees (g)) == {4}
        assert girth (g) == 3

    def test_tightness_lists_resolve(self):
        for text in INERTIA_TIGHT_CATALOG + HOFFMAN_TIGHT_NOT_INERTIA:
            assert catalog (text).n <= 40

    def test_paley_regular(self):
        g = catalog ('paley:17')
        assert is_regular (g) and degrees (g)[0] == 8


def nx_bipartition(g):
    import networkx as nx
    return nx.bipartite.sets (to_networkx (g))


class TestDistances:
    def test_path(self):
        assert distance_matrix (catalog ('path:3'))[0, 2] == 2

    def test_petersen_diameter(self, petersen):
        assert diameter (petersen) == 2
        assert distance_matrix (petersen).max () == 2

    def test_empty_is_infinite(self):
        dist = distance_matrix (catalog ('empty:4'))
        off = dist[~np.eye (4, dtype=bool)]
        assert np.isinf (off).all ()

    def test_metric_properties(self, small_corpus):
        for g in small_corpus:
            dist = distance_matrix (g)
            assert (dist == dist.T).all ()
            assert not np.diagonal (dist).any ()
            a = adjacency_matrix (g)
            assert ((dist == 1) == (a == 1)).all ()
            n = g.n
            for u in range (n):
                for v in range (n):
                    assert dist[u, v] <= (dist[u, :] + dist[:, v]).min ()


class TestPowerGraph:
    def test_cycle6_square(self):
        g = power_graph (catalog ('cycle:6'), 2)
        assert set (degrees (g)) == {4}

    def test_petersen_square_is_complete(self, petersen):
        assert power_graph (petersen, 2) == catalog ('complete:10')

    def test_identity(self, petersen):
        assert power_graph (petersen, 1) == petersen

    def test_components_become_cliques(self, small_corpus):
        for g in small_corpus:
            h = power_graph (g, max (1, diameter (g)))
            for component in connected_components (g):
                size = len (component)
                for u in component:
                    inside = sum (1 for v in component if v != u and (min (u, v), max (u, v)) in h.edges)
                    assert inside == size - 1


def test_random_graph_is_deterministic():
    assert random_graph (9, 0.5, 3) == random_graph (9, 0.5, 3)


def test_networkx_round_trip(petersen):
    assert from_networkx (to_networkx (petersen)) == petersen


def test_girth_of_tree_is_infinite():
    assert math.isinf (girth (catalog ('path:5')))
