"""
Тесты модуля bounds: полиномиальная, инерционная, Хоффмана и ван Дама–Хемерса
"""

import os
from fractions import Fraction

import numpy as np
import pytest

from models import ZeroPolicy, ContractViolationError, RegularityError, DegenerateGraphError
from graph_core import (
    Graph, catalog, adjacency_matrix, is_regular, read_graphs, INERTIA_TIGHT_CATALOG, HOFFMAN_TIGHT_NOT_INERTIA
)
from exact_oracle import alpha_exact, alpha_k_exact
from bounds import (
    Polynomial, walk_extrema, poly_spectral_bound, best_grid_polynomial, inertia_bound,
    graph_inertia_bound, hoffman_bound, hoffman_ratio, vdh_bound, bound_chain, safe_floor
)


def _by_name(reports):
    return {r.bound: r for r in reports}


def _relabel(g: Graph, rng) -> Graph:
    perm = rng.permutation (g.n)
    return Graph.from_edges (g.n, ((int (perm[u]), int (perm[v])) for u, v in g.edges))


class TestPolynomial:
    def test_parse(self):
        p = Polynomial.parse ("0, 1, 1")
        assert p.coefficients == (0, 1, 1)
        assert p.degree == 2
        assert p.label () == "x^2+x"

    def test_fractions(self):
        p = Polynomial.parse ("1/2,0.5")
        assert p.coefficients == (Fraction (1, 2), Fraction (1, 2))
        assert p.is_rational
        assert p.evaluate (2.0) == 1.5

    def test_label_with_negatives(self):
        assert Polynomial ((-1, 0, -2)).label () == "-2x^2-1"
        assert Polynomial.monomial (3).label () == "x^3"

    def test_zero(self):
        assert Polynomial ((0, 0)).is_zero
        assert Polynomial ((0, 0)).degree == -1

    @pytest.mark.parametrize ("text", ["", "1,,2", "a,1"])
    def test_parse_errors(self, text):
        with pytest.raises (ContractViolationError):
            Polynomial.parse (text)

    def test_matrix_evaluation_agrees(self, petersen):
        p = Polynomial ((1, -2, 3))
        a = adjacency_matrix (petersen)
        exact = p.evaluate_matrix_exact (a).astype (float)
        assert np.allclose (exact, p.evaluate_matrix (a.astype (float)))


class TestWalkExtrema:
    def test_petersen_square(self, petersen):
        extrema = walk_extrema (petersen, Polynomial.monomial (2))
        assert (extrema.w, extrema.W) == (3, 3)

    def test_linear_is_zero(self, small_corpus):
        for g in small_corpus:
            extrema = walk_extrema (g, Polynomial.monomial (1))
            assert (extrema.w, extrema.W) == (0, 0)

    def test_star(self):
        extrema = walk_extrema (catalog ('star:3'), Polynomial.monomial (2))
        assert (extrema.w, extrema.W) == (1, 3)


class TestPolySpectralBound:
    def test_petersen_square(self, petersen):
        report = poly_spectral_bound (petersen, Polynomial.monomial (2))
        assert report.value == 5
        assert (report.counts.ge_w, report.counts.le_W) == (5, 5)
        assert report.witness["binding"] == 'both'

    def test_petersen_square_plus_x(self, petersen):
        report = poly_spectral_bound (petersen, Polynomial.parse ("0,1,1"))
        assert report.value == 1
        assert (report.counts.ge_w, report.counts.le_W) == (1, 9)
        assert report.witness["binding"] == 'ge_w'
        assert report.value == alpha_k_exact (petersen, 2)[0]

    def test_cycle_linear(self, c5):
        assert poly_spectral_bound (c5, Polynomial.monomial (1)).value == 2

    def test_zero_polynomial_rejected(self, c5):
        with pytest.raises (ContractViolationError):
            poly_spectral_bound (c5, Polynomial ((0,)))

    def test_matches_inertia_bound(self, small_corpus):
        for g in small_corpus:
            assert poly_spectral_bound (g, Polynomial.monomial (1)).value == graph_inertia_bound (g).value

    def test_sandwich_on_corpus(self, small_corpus, rng):
        for g in small_corpus:
            for k in (1, 2, 3):
                alpha = alpha_k_exact (g, k)[0]
                polynomials = [Polynomial.monomial (k), Polynomial (tuple ([0, 1] + [0] * (k - 2) + [1]))
                               if k >= 2 else Polynomial ((0, 2))]
                while len (polynomials) < 7:
                    p = Polynomial (tuple (int (c) for c in rng.integers (-3, 4, size=k + 1)))
                    if not p.is_zero:
                        polynomials.append (p)
                for p in polynomials:
                    assert alpha <= poly_spectral_bound (g, p).value, (g, k, p)

    def test_relabeling_invariance(self, small_corpus, rng):
        for g in small_corpus[:10]:
            h = _relabel (g, rng)
            for k in (1, 2):
                p = Polynomial.monomial (k)
                assert poly_spectral_bound (g, p).value == poly_spectral_bound (h, p).value
            assert graph_inertia_bound (g).value == graph_inertia_bound (h).value


class TestGrid:
    def test_petersen_k2(self, petersen):
        p, report = best_grid_polynomial (petersen, 2)
        assert report.value == 1
        assert p.label () == "x^2+x"
        assert report.witness["grid"] is True

    def test_never_worse_than_monomial(self, small_corpus):
        for g in small_corpus[:10]:
            _, report = best_grid_polynomial (g, 2)
            assert report.value <= poly_spectral_bound (g, Polynomial.monomial (2)).value


class TestInertiaBound:
    def test_petersen(self, petersen):
        report = inertia_bound (adjacency_matrix (petersen))
        assert report.value == 4
        assert report.witness["inertia"] == [6, 0, 4]

    def test_cycle(self, c5):
        assert graph_inertia_bound (c5).value == 2

    def test_empty(self):
        assert graph_inertia_bound (catalog ('empty:6')).value == 6

    def test_tolerance_mode(self, petersen):
        report = inertia_bound (adjacency_matrix (petersen), ZeroPolicy.tolerance ())
        assert report.value == 4
        assert report.witness["mode"] == 'tolerance'

    def test_tight_catalog(self):
        for text in INERTIA_TIGHT_CATALOG:
            g = catalog (text)
            assert graph_inertia_bound (g).value == alpha_exact (g)[0], text

    def test_grotzsch(self):
        g = catalog ('grotzsch')
        assert graph_inertia_bound (g).value == alpha_exact (g)[0] == 5

    def test_higman_sims(self, fixtures_dir):
        [(_, g)] = read_graphs (os.path.join (fixtures_dir, 'higman_sims.g6'))
        report = graph_inertia_bound (g, ZeroPolicy.tolerance ())
        assert report.witness["inertia"] == [78, 0, 22]
        assert report.value == 22
        assert hoffman_bound (g).floor == 26

    def test_complete_bipartite_not_tight(self):
        g = catalog ('complete_bipartite:3,3')
        assert graph_inertia_bound (g).value == 5
        assert alpha_exact (g)[0] == 3

    def test_upper_bound_on_corpus(self, small_corpus):
        for g in small_corpus:
            assert graph_inertia_bound (g).value >= alpha_exact (g)[0]


class TestHoffman:
    def test_petersen(self, petersen):
        report = hoffman_bound (petersen)
        assert report.value == pytest.approx (4.0)
        assert report.floor == 4

    def test_complete(self):
        for n in (2, 5, 8):
            assert hoffman_bound (catalog (f'complete:{n}')).value == pytest.approx (1.0)

    def test_cycle(self, c5):
        report = hoffman_bound (c5)
        assert report.value == pytest.approx (2.2360679775)
        assert report.floor == 2

    def test_irregular_rejected(self):
        with pytest.raises (RegularityError):
            hoffman_bound (catalog ('star:3'))

    def test_edgeless_rejected(self):
        with pytest.raises (DegenerateGraphError):
            hoffman_bound (catalog ('empty:4'))

    def test_scale_invariance(self):
        for n, delta, lam in [(10, 3, -2.0), (5, 2, -1.618), (16, 6, -2.0)]:
            for c in (0.5, 2.0, 7.0):
                assert hoffman_ratio (n, c * delta, c * lam) == pytest.approx (hoffman_ratio (n, delta, lam))

    def test_upper_bound_on_regular_graphs(self, small_corpus):
        for g in [g for g in small_corpus if is_regular (g) and g.m > 0] + [catalog ('shrikhande'),
                                                                             catalog ('hypercube:4')]:
            assert alpha_exact (g)[0] <= hoffman_bound (g).floor

    def test_tight_where_inertia_is_not(self):
        for text in HOFFMAN_TIGHT_NOT_INERTIA:
            g = catalog (text)
            alpha = alpha_exact (g)[0]
            assert hoffman_bound (g).floor == alpha
            assert graph_inertia_bound (g).value > alpha

    def test_safe_floor(self):
        assert safe_floor (3.9999999999999996) == 4
        assert safe_floor (2.236) == 2


class TestVanDamHaemers:
    def test_petersen(self, petersen):
        assert vdh_bound (petersen).value == pytest.approx (4.0)

    def test_single_edge(self):
        assert vdh_bound (catalog ('path:2')).value == pytest.approx (1.0)

    def test_edgeless_rejected(self):
        with pytest.raises (DegenerateGraphError):
            vdh_bound (catalog ('empty:3'))

    def test_equals_hoffman_on_regular(self):
        for text in ['petersen', 'cycle:5', 'cycle:8', 'clebsch', 'paley:13', 'shrikhande', 'heawood']:
            g = catalog (text)
            assert vdh_bound (g).value == pytest.approx (hoffman_bound (g).value, abs=1e-9)

    def test_upper_bound_on_corpus(self, small_corpus):
        for g in small_corpus:
            if g.m:
                assert vdh_bound (g).value + 1e-9 >= alpha_exact (g)[0]


class TestBoundChain:
    def test_petersen_k1(self, petersen):
        reports = _by_name (bound_chain (petersen, 1, graph_id='petersen'))
        assert set (reports) == {'inertia', 'polynomial', 'hoffman', 'vdh', 'exact'}
        assert reports['inertia'].value == 4
        assert reports['exact'].value == 4
        assert all (r.tight for r in reports.values ())
        assert reports['inertia'].graph == 'petersen'

    def test_petersen_k2(self, petersen):
        reports = _by_name (bound_chain (petersen, 2))
        assert reports['polynomial'].value == 5
        assert reports['exact'].value == 1
        assert reports['polynomial'].tight is False
        assert reports['inertia_power'].value == 1
        assert reports['inertia_power'].tight is True
        assert 'hoffman' not in reports

    def test_empty(self):
        reports = _by_name (bound_chain (catalog ('empty:4'), 1))
        assert reports['inertia'].value == 4
        assert reports['exact'].value == 4
        assert 'hoffman' not in reports and 'vdh' not in reports

    def test_grid(self, petersen):
        reports = _by_name (bound_chain (petersen, 2, grid=True))
        assert reports['polynomial'].value == 1
        assert reports['polynomial'].tight is True

    def test_custom_polynomial(self, petersen):
        reports = _by_name (bound_chain (petersen, 2, p=Polynomial.parse ("0,1,1")))
        assert reports['polynomial'].value == 1

    def test_irregular_has_vdh_only(self):
        reports = _by_name (bound_chain (catalog ('star:4'), 1))
        assert 'hoffman' not in reports
        assert reports['vdh'].value >= reports['exact'].value

    def test_over_budget_skips_exact(self):
        reports = _by_name (bound_chain (catalog ('cycle:50'), 1, oracle_budget=40))
        assert 'exact' not in reports
        assert reports['inertia'].tight is None

    def test_no_oracle(self, petersen):
        assert 'exact' not in _by_name (bound_chain (petersen, 1, oracle_budget=None))

    def test_degree_above_k_rejected(self, petersen):
        with pytest.raises (ContractViolationError):
            bound_chain (petersen, 1, p=Polynomial.monomial (2))

    def test_k_must_be_positive(self, petersen):
        with pytest.raises (ContractViolationError):
            bound_chain (petersen, 0)

    def test_report_json(self, petersen):
        data = bound_chain (petersen, 1)[0].to_json ()
        assert data["bound"] == 'inertia'
        assert data["counts"] == {"ge_w": 6, "le_W": 4}
        assert data["tight"] is True
