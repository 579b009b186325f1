import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrank_prep.errors import InvalidInput
from lowrank_prep.linalg import Bipartition, random_state, reconstruct, schmidt_decompose, truncate
from lowrank_prep.measures import (
    fidelity,
    m_of,
    measure_report,
    meyer_wallach,
    purity_from_sigma,
    schmidt_measure,
)

from oracles import embed_1q, haar_state, haar_unitary, meyer_wallach_dm

SQ2 = 1 / np.sqrt(2)
GHZ3 = np.zeros(8, dtype=complex)
GHZ3[[0, 7]] = SQ2
W3 = np.zeros(8, dtype=complex)
W3[[1, 2, 4]] = 1 / np.sqrt(3)


class TestPurity:
    def test_reference_spectrum(self):
        s = np.array([0.9033, 0.3256, 0.2348, 0.1509])
        # the quoted coefficients carry four digits, so normalize before use
        assert purity_from_sigma(s / np.linalg.norm(s)) == pytest.approx(0.6807, abs=5e-4)

    def test_product(self):
        assert purity_from_sigma([1.0]) == 1.0

    def test_bell(self):
        assert purity_from_sigma([SQ2, SQ2]) == pytest.approx(0.5)

    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidInput):
            purity_from_sigma([0.9033, 0.3256, 0.2348, 0.1509])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=16))
    def test_bounds(self, raw):
        s = np.sort(np.asarray(raw))[::-1]
        s = s / np.linalg.norm(s)
        p = purity_from_sigma(s)
        assert 1 / len(s) - 1e-12 <= p <= 1 + 1e-12

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 7))
    def test_truncation_raises_purity(self, seed, r):
        sd = schmidt_decompose(haar_state(6, np.random.default_rng(seed)), Bipartition.half(6))
        tr = truncate(sd, r)
        assert purity_from_sigma(tr.sigma_prime) >= purity_from_sigma(sd.sigma) - 1e-12


class TestSchmidtMeasure:
    @pytest.mark.parametrize("rank,es,m", [(1, 0.0, 0), (2, 1.0, 1), (4, 2.0, 2), (5, 2.321928, 3)])
    def test_values(self, rank, es, m):
        assert schmidt_measure(rank) == pytest.approx(es, abs=1e-6)
        assert m_of(rank) == m

    @pytest.mark.parametrize("rank", range(1, 70))
    def test_m_is_ceil_log2(self, rank):
        assert m_of(rank) == math.ceil(math.log2(rank))

    @pytest.mark.parametrize("fn", [schmidt_measure, m_of])
    def test_rejects_zero(self, fn):
        with pytest.raises(InvalidInput):
            fn(0)


class TestMeyerWallach:
    def test_ghz(self):
        assert meyer_wallach(GHZ3) == pytest.approx(1.0, abs=1e-12)

    def test_w(self):
        assert meyer_wallach(W3) == pytest.approx(8 / 9, abs=1e-12)

    def test_product(self):
        rng = np.random.default_rng(0)
        psi = np.kron(np.kron(haar_state(1, rng), haar_state(1, rng)), haar_state(1, rng))
        assert meyer_wallach(psi) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_density_matrix_oracle(self, n):
        psi = random_state(n, 100 + n)
        assert meyer_wallach(psi) == pytest.approx(meyer_wallach_dm(psi), abs=1e-10)

    def test_rejects_single_qubit(self):
        with pytest.raises(InvalidInput):
            meyer_wallach([1.0, 0.0])

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(2, 6), seed=st.integers(0, 2**32 - 1), data=st.data())
    def test_local_unitary_invariance(self, n, seed, data):
        rng = np.random.default_rng(seed)
        psi = haar_state(n, rng)
        q = data.draw(st.integers(0, n - 1))
        moved = embed_1q(haar_unitary(2, rng), q, n) @ psi
        assert abs(meyer_wallach(psi) - meyer_wallach(moved)) < 1e-9
        assert 0.0 <= meyer_wallach(psi) <= 1.0


class TestFidelity:
    def test_self(self):
        psi = random_state(3, 1)
        assert fidelity(psi, psi) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert fidelity([1, 0], [0, 1]) == 0.0

    def test_mismatch(self):
        with pytest.raises(InvalidInput):
            fidelity([1, 0], [1, 0, 0, 0])

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_truncation_identity(self, r):
        psi = random_state(4, 9)
        tr = truncate(schmidt_decompose(psi, Bipartition.half(4)), r)
        assert fidelity(psi, reconstruct(tr)) == pytest.approx(1 - tr.loss, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
    def test_symmetric_and_phase_blind(self, seed, phase):
        rng = np.random.default_rng(seed)
        a, b = haar_state(3, rng), haar_state(3, rng)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)
        rot = np.exp(1j * phase)
        assert fidelity(a * rot, b * rot) == pytest.approx(fidelity(a, b), abs=1e-14)


class TestReport:
    def test_bell(self):
        rep = measure_report(np.array([SQ2, 0, 0, SQ2]))
        assert rep.schmidt_rank == 2
        assert rep.schmidt_measure == 1.0
        assert rep.m_qubits == 1
        assert rep.purity == pytest.approx(0.5)
        assert rep.meyer_wallach == pytest.approx(1.0)

    def test_explicit_bipartition(self):
        rep = measure_report(GHZ3, Bipartition((1,), (0, 2)))
        assert rep.schmidt_rank == 2
        assert set(rep.to_dict()) == {
            "purity",
            "schmidt_rank",
            "schmidt_measure",
            "m_qubits",
            "meyer_wallach",
        }
