"""
Тесты модуля packing_cert: проекторы, упаковки, квантовые сертификаты, ортогональность по следу
"""

from fractions import Fraction

import numpy as np
import pytest

from models import IndependentSetCert, ProjectorError, CertificateFormatError, ContractViolationError
from graph_core import catalog
from exact_oracle import alpha_k_exact
from bounds import Polynomial, poly_spectral_bound
from packing_cert import (
    PackingCertificate, QuantumCertificate, projector_check, random_projector, packing_value,
    verify_packing, lift_independent_set, verify_quantum_cert, lift_to_quantum, trace_orthogonality_check,
    cross_products, load_certificate, write_certificate, trace_inner, inspect_projector, KIND_PACKING
)


def _basis_projector(d: int, indices) -> np.ndarray:
    m = np.zeros ((d, d), dtype=complex)
    for i in indices:
        m[i, i] = 1
    return m


class TestProjector:
    def test_rank(self):
        assert projector_check (_basis_projector (3, [0, 2])) == 2
        assert projector_check (np.zeros ((2, 2))) == 0

    def test_random_projector(self, rng):
        for rank in range (4):
            assert projector_check (random_projector (4, rank, rng)) == rank

    def test_rank1_complex(self):
        v = np.array ([1, 1j]) / np.sqrt (2)
        assert projector_check (np.outer (v, v.conj ())) == 1

    @pytest.mark.parametrize ("m, residual", [
        (np.array ([[1, 1], [0, 0]]), 'hermitian'),
        (np.array ([[2, 0], [0, 0]]), 'idempotent'),
        (np.array ([[0.5, 0], [0, 0]]), 'idempotent'),
    ])
    def test_not_a_projector(self, m, residual):
        with pytest.raises (ProjectorError) as info:
            projector_check (m)
        assert info.value.residuals[residual] > 0

    def test_non_square(self):
        with pytest.raises (CertificateFormatError):
            projector_check (np.zeros ((2, 3)))

    def test_fractional_trace_guard_is_absolute(self):
        # Норма Фробениуса 5 не расширяет допуск на дробную часть следа
        check = inspect_projector (np.eye (25) * (1 + 0.8e-4), tol=1e-4)
        assert check.rank is None
        assert check.residuals["trace"] == pytest.approx (2e-3)
        assert inspect_projector (np.eye (25) * (1 + 1e-6), tol=1e-4).rank == 25


class TestPacking:
    def test_lift_has_alpha_value(self, small_corpus):
        for g in small_corpus[:20]:
            for k in (1, 2):
                size, cert = alpha_k_exact (g, k)
                report = verify_packing (g, k, lift_independent_set (g, cert))
                assert report.valid
                assert report.value == Fraction (size)

    def test_classical_chain(self, small_corpus):
        for g in small_corpus[:20]:
            for k in (1, 2, 3):
                size, cert = alpha_k_exact (g, k)
                value = verify_packing (g, k, lift_independent_set (g, cert)).value
                assert size <= value <= poly_spectral_bound (g, Polynomial.monomial (k)).value

    def test_orthogonality_violation(self):
        g = catalog ('path:2')
        p = _basis_projector (2, [0])
        cert = PackingCertificate (d=2, projectors={0: p, 1: p})
        report = verify_packing (g, 1, cert)
        assert report.conditions () == ['orthogonality']
        assert report.violations[0].indices == [0, 1]
        assert report.value == Fraction (1)

    def test_projector_violation(self):
        g = catalog ('path:2')
        cert = PackingCertificate (d=2, projectors={0: np.eye (2) * 2, 1: np.zeros ((2, 2))})
        report = verify_packing (g, 1, cert)
        assert report.conditions () == ['projector']
        assert report.value is None

    def test_orthogonal_packing_on_edge(self):
        g = catalog ('path:2')
        cert = PackingCertificate (d=3, projectors={0: _basis_projector (3, [0, 1]), 1: _basis_projector (3, [2])})
        report = verify_packing (g, 1, cert)
        assert report.valid
        assert report.value == Fraction (1)
        assert packing_value (cert) == Fraction (1)

    def test_fractional_value(self):
        g = catalog ('empty:3')
        projectors = {u: _basis_projector (2, [0]) for u in range (3)}
        report = verify_packing (g, 1, PackingCertificate (d=2, projectors=projectors))
        assert report.valid
        assert report.value == Fraction (3, 2)

    def test_threads_do_not_change_result(self, petersen, rng):
        projectors = {u: random_projector (2, 1, rng) for u in range (petersen.n)}
        cert = PackingCertificate (d=2, projectors=projectors)
        single = verify_packing (petersen, 1, cert, threads=1)
        pooled = verify_packing (petersen, 1, cert, threads=4)
        assert single.violations == pooled.violations

    def test_missing_vertex(self, c5):
        cert = PackingCertificate (d=1, projectors={u: np.zeros ((1, 1)) for u in range (4)})
        with pytest.raises (CertificateFormatError):
            verify_packing (c5, 1, cert)

    def test_shape_mismatch(self):
        g = catalog ('path:2')
        cert = PackingCertificate (d=2, projectors={0: np.zeros ((2, 2)), 1: np.zeros ((3, 3))})
        with pytest.raises (CertificateFormatError):
            verify_packing (g, 1, cert)

    def test_lift_rejects_invalid_set(self, c5):
        with pytest.raises (ContractViolationError):
            lift_independent_set (c5, IndependentSetCert (vertices=[0, 1]))


class TestQuantum:
    def test_lift_verifies(self, small_corpus):
        for g in small_corpus[:20]:
            for k in (1, 2):
                size, cert = alpha_k_exact (g, k)
                report = verify_quantum_cert (g, k, lift_to_quantum (g, cert))
                assert report.valid
                assert report.value == Fraction (size)

    def test_partition_violation(self, c5):
        cert = lift_to_quantum (c5, IndependentSetCert (vertices=[0, 2]))
        cert.projectors[(0, 0)] = np.zeros ((1, 1), dtype=complex)
        report = verify_quantum_cert (c5, 1, cert)
        assert 'partition' in report.conditions ()
        assert [0] in [v.indices for v in report.violations if v.condition == 'partition']
        assert report.value is None

    def test_same_vertex_violation(self):
        g = catalog ('empty:2')
        one, zero = np.ones ((1, 1)), np.zeros ((1, 1))
        projectors = {(0, 0): one, (0, 1): one, (1, 0): zero, (1, 1): zero}
        report = verify_quantum_cert (g, 1, QuantumCertificate (d=1, t=2, projectors=projectors))
        assert report.conditions () == ['same_vertex']
        assert report.violations[0].indices == [0, 0, 1]

    def test_near_pair_violation(self):
        g = catalog ('path:2')
        one, zero = np.ones ((1, 1)), np.zeros ((1, 1))
        projectors = {(0, 0): one, (0, 1): zero, (1, 0): zero, (1, 1): one}
        report = verify_quantum_cert (g, 1, QuantumCertificate (d=1, t=2, projectors=projectors))
        assert report.conditions () == ['near_pair']
        assert report.violations[0].indices == [0, 1, 0, 1]

    def test_same_pair_far_apart_is_valid(self):
        g = catalog ('path:3')
        one, zero = np.ones ((1, 1)), np.zeros ((1, 1))
        projectors = {(0, 0): one, (1, 0): zero, (2, 0): zero,
                      (0, 1): zero, (1, 1): zero, (2, 1): one}
        cert = QuantumCertificate (d=1, t=2, projectors=projectors)
        assert verify_quantum_cert (g, 1, cert).valid
        assert not verify_quantum_cert (g, 2, cert).valid

    def test_higher_dimension(self):
        g = catalog ('empty:2')
        projectors = {(0, 0): _basis_projector (2, [0]), (1, 0): _basis_projector (2, [1]),
                      (0, 1): _basis_projector (2, [1]), (1, 1): _basis_projector (2, [0])}
        report = verify_quantum_cert (g, 1, QuantumCertificate (d=2, t=2, projectors=projectors))
        assert report.valid
        assert report.value == 2

    def test_incomplete_indexing(self, c5):
        projectors = {(u, 0): np.zeros ((1, 1)) for u in range (5)}
        with pytest.raises (CertificateFormatError):
            verify_quantum_cert (c5, 1, QuantumCertificate (d=1, t=2, projectors=projectors))

    def test_empty_set_rejected(self, c5):
        with pytest.raises (ContractViolationError):
            lift_to_quantum (c5, IndependentSetCert (vertices=[]))


class TestTraceOrthogonality:
    def test_orthogonal_basis_projectors(self):
        assert trace_orthogonality_check (_basis_projector (3, [0]), _basis_projector (3, [1, 2]))
        assert not trace_orthogonality_check (_basis_projector (3, [0, 1]), _basis_projector (3, [1]))

    def test_cross_products_shape(self):
        cross = cross_products (_basis_projector (4, [0, 1]), _basis_projector (4, [2]))
        assert cross.shape == (2, 1)
        assert np.allclose (cross, 0)

    def test_random_pairs_agree(self, rng):
        disagreements = 0
        for _ in range (200):
            d = int (rng.integers (1, 7))
            r1, r2 = int (rng.integers (0, min (d, 3) + 1)), int (rng.integers (0, min (d, 3) + 1))
            p = random_projector (d, r1, rng)
            if rng.random () < 0.5 and r1 + r2 <= d:
                # q в ортогональном дополнении образа p
                q = _projector_into (np.eye (d) - p, r2, rng)
            else:
                q = random_projector (d, r2, rng)
            by_trace = trace_orthogonality_check (p, q)
            by_vectors = cross_products (p, q)
            if by_trace != (by_vectors.size == 0 or np.max (np.abs (by_vectors)) <= 1e-4):
                disagreements += 1
        assert disagreements == 0

    def test_shape_mismatch(self):
        with pytest.raises (CertificateFormatError):
            trace_orthogonality_check (np.zeros ((2, 2)), np.zeros ((3, 3)))

    def test_not_projector(self):
        with pytest.raises (ProjectorError):
            trace_orthogonality_check (np.eye (2) * 2, np.eye (2))

    def test_rank_aware_agreement(self):
        p = _basis_projector (2, [0])
        for overlap, expected in ((0.005, True), (0.012, False)):
            v = np.array ([np.sqrt (overlap), np.sqrt (1 - overlap)])
            assert trace_orthogonality_check (p, np.outer (v, v), tol=1e-2) is expected

    def test_basis_inconsistent_with_ranks(self, monkeypatch):
        # Четыре произведения по 0.003 дают tr = 0.012 > tol при рангах 1 и 1
        v = np.array ([np.sqrt (0.012), np.sqrt (0.988)])
        monkeypatch.setattr ('packing_cert.cross_products', lambda p, q: np.full ((2, 2), np.sqrt (0.003)))
        with pytest.raises (ContractViolationError):
            trace_orthogonality_check (_basis_projector (2, [0]), np.outer (v, v), tol=1e-2)

    def test_trace_inner_conjugates_first(self):
        x = np.array ([[1j, 0], [0, 0]])
        assert trace_inner (x, x) == pytest.approx (1.0)


def _projector_into(space: np.ndarray, rank: int, rng) -> np.ndarray:
    """Случайный проектор ранга rank внутри образа проектора space"""
    d = space.shape[0]
    if rank == 0:
        return np.zeros ((d, d), dtype=complex)
    block = space @ (rng.standard_normal ((d, rank)) + 1j * rng.standard_normal ((d, rank)))
    q, _ = np.linalg.qr (block)
    return q @ q.conj ().T


class TestJson:
    def test_packing_round_trip(self, c5):
        cert = lift_independent_set (c5, IndependentSetCert (vertices=[0, 2]))
        loaded = load_certificate (write_certificate (cert))
        assert isinstance (loaded, PackingCertificate)
        assert loaded.d == 1 and loaded.k == 1
        assert verify_packing (c5, 1, loaded).value == 2

    def test_quantum_round_trip_d2(self):
        g = catalog ('empty:2')
        projectors = {(0, 0): _basis_projector (2, [0]), (1, 0): _basis_projector (2, [1]),
                      (0, 1): _basis_projector (2, [1]), (1, 1): _basis_projector (2, [0])}
        data = write_certificate (QuantumCertificate (d=2, t=2, projectors=projectors, k=1))
        assert data["t"] == 2
        loaded = load_certificate (data)
        assert isinstance (loaded, QuantumCertificate)
        assert verify_quantum_cert (g, 1, loaded).valid

    def test_real_entries_accepted(self):
        loaded = load_certificate ({"d": 2, "k": 1, "projectors": {"0": [[1, 0], [0, 0]], "1": [[0, 0], [0, 1]]}})
        assert isinstance (loaded, PackingCertificate)
        assert verify_packing (catalog ('path:2'), 1, loaded).valid

    def test_quantum_detected_without_t(self):
        data = {"d": 1, "projectors": {"0": [[[1]], [[0]]], "1": [[[0]], [[1]]]}}
        loaded = load_certificate (data)
        assert isinstance (loaded, QuantumCertificate)
        assert loaded.t == 2

    def test_quantum_d2_single_matrix_without_t(self):
        data = {"d": 2, "k": 1, "projectors": {"0": [[[1, 0], [0, 0]]], "1": [[[0, 0], [0, 1]]]}}
        loaded = load_certificate (data)
        assert isinstance (loaded, QuantumCertificate)
        assert loaded.t == 1
        report = verify_quantum_cert (catalog ('path:2'), 1, loaded)
        assert report.valid and report.value == 1

    def test_quantum_d2_three_matrices_without_t(self):
        rows = [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[1, 0], [0, 0]]]
        loaded = load_certificate ({"d": 2, "projectors": {"0": rows, "1": rows}})
        assert isinstance (loaded, QuantumCertificate)
        assert loaded.t == 3

    def test_ambiguous_d2_requires_t(self):
        data = {"d": 2, "k": 1, "projectors": {"0": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
                                               "1": [[[0, 0], [0, 1]], [[1, 0], [0, 0]]]}}
        with pytest.raises (CertificateFormatError, match="'t'"):
            load_certificate (data)
        loaded = load_certificate ({**data, "t": 2})
        assert isinstance (loaded, QuantumCertificate)
        report = verify_quantum_cert (catalog ('empty:2'), 1, loaded)
        assert report.valid and report.value == 2

    def test_packing_d2_pairs_keep_kind(self):
        g = catalog ('path:2')
        cert = PackingCertificate (d=2, projectors={0: _basis_projector (2, [0]), 1: _basis_projector (2, [1])})
        data = write_certificate (cert)
        assert data["kind"] == KIND_PACKING
        loaded = load_certificate (data)
        assert isinstance (loaded, PackingCertificate)
        assert verify_packing (g, 1, loaded).value == 1
        data.pop ("kind")
        with pytest.raises (CertificateFormatError):
            load_certificate (data)

    def test_unknown_kind(self):
        with pytest.raises (CertificateFormatError):
            load_certificate ({"kind": "mixed", "d": 1, "projectors": {"0": [[1]]}})

    @pytest.mark.parametrize ("data", [
        {"projectors": {}},
        {"d": "2", "projectors": {}},
        {"d": 1, "projectors": {"a": [[1]]}},
        {"d": 1, "projectors": {"0": [[1, 0]]}},
    ])
    def test_malformed(self, data):
        with pytest.raises (CertificateFormatError):
            load_certificate (data)
