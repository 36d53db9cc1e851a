import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_span_state
from hbondq.bonds import HBondAmplitudes
from hbondq.entanglement import eof_2q
from hbondq.qmath import DensityMatrix, QuantumStateError, RegisterLayout, StateVector, fidelity, ket
from hbondq.recognition import (
    SWAP_UNITARY,
    EigenBasis,
    LigandProfile,
    apply_UA,
    apply_UA_multi,
    capacity,
    classify,
    classify_multi,
    conformation_distribution,
    decompose_in_eigenbasis,
    enumerate_agonists,
    measurement_basis,
    min_bonds,
    psi_state,
    reduced_marginals,
    standard_ligands,
    swap_distribute,
    swap_protocol,
)

S2, S3, S6 = 1 / math.sqrt(2), 1 / math.sqrt(3), 1 / math.sqrt(6)
LIGANDS = standard_ligands()
BASIS = EigenBasis.default()


def d_after_swap():
    return psi_state((S6, 2 * S6, S6))


class TestEigenBasis:
    def test_default_vectors(self):
        # amplitudes on (|00>, |01>, |10>, |11>) with psi1=|10>, psi2=|01>, psi3=|00>
        np.testing.assert_allclose(BASIS.eps1.amps, [-S2, 0, S2, 0], atol=1e-15)
        np.testing.assert_allclose(BASIS.eps2.amps, [S3, S3, S3, 0], atol=1e-15)
        np.testing.assert_allclose(BASIS.eps3.amps, [S6, -2 * S6, S6, 0], atol=1e-15)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(QuantumStateError):
            EigenBasis(BASIS.eps1, BASIS.eps2, BASIS.eps2)

    def test_rejects_out_of_span(self):
        lay = BASIS.layout
        with pytest.raises(QuantumStateError):
            EigenBasis(BASIS.eps1, BASIS.eps2, StateVector.basis(lay, "11"))


class TestApplyUA:
    def test_eigenstates_map_to_their_conformation(self):
        for j, eps in enumerate(BASIS.vectors, start=1):
            out = apply_UA(eps, BASIS)
            expected = np.kron(eps.amps, np.eye(3)[j - 1])
            np.testing.assert_allclose(out.amps, expected, atol=1e-12)

    def test_antagonist_superposition(self):
        out = apply_UA(d_after_swap(), BASIS)
        expected = (2 * math.sqrt(2) * np.kron(BASIS.eps2.amps, [0, 1, 0]) - np.kron(BASIS.eps3.amps, [0, 0, 1])) / 3
        assert abs(np.vdot(expected, out.amps)) == pytest.approx(1, abs=1e-12)

    def test_rejects_out_of_span(self):
        bad = ket(BASIS.layout, {"11": 1})
        with pytest.raises(QuantumStateError):
            apply_UA(bad, BASIS)

    def test_inner_products_preserved(self, rng):
        for _ in range(50):
            a, b = random_span_state(rng), random_span_state(rng)
            out = np.vdot(apply_UA(a, BASIS).amps, apply_UA(b, BASIS).amps)
            assert abs(out) == pytest.approx(abs(np.vdot(a.amps, b.amps)), abs=1e-9)

    def test_layout(self):
        out = apply_UA(BASIS.eps1, BASIS)
        assert out.layout.labels == ("X2", "X1", "chi")
        assert out.layout.dims == (2, 2, 3)


def _branch_oracle(bonds, bases):
    """Direct expansion: amplitude of branch (j_1..j_n) is prod_k <eps^k_{j_k}|bond_k>."""
    n = len(bonds)
    out = {}
    for combo in itertools.product((1, 2, 3), repeat=n):
        amp = 1.0
        for k, j in enumerate(combo):
            amp *= np.vdot(bases[k].vectors[j - 1].amps, bonds[k].amps)
        if abs(amp) ** 2 > 1e-15:
            out[combo] = abs(amp) ** 2
    return out


class TestApplyUAMulti:
    def test_single_bond_matches(self):
        a = apply_UA_multi([d_after_swap()], [BASIS])
        b = apply_UA(d_after_swap(), BASIS)
        np.testing.assert_allclose(a.amps, b.amps)

    def test_two_eps2_bonds(self):
        joint = apply_UA_multi([BASIS.eps2, BASIS.eps2], [BASIS, BASIS])
        assert conformation_distribution(joint) == pytest.approx({(2, 2): 1.0})

    def test_eps2_and_antagonist(self):
        bonds = [BASIS.eps2, d_after_swap()]
        dist = conformation_distribution(apply_UA_multi(bonds, [BASIS, BASIS]))
        assert dist == pytest.approx({(2, 2): 8 / 9, (2, 3): 1 / 9})
        assert dist == pytest.approx(_branch_oracle(bonds, [BASIS, BASIS]))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random_bonds_match_oracle(self, rng, n):
        bonds = [random_span_state(rng) for _ in range(n)]
        joint = apply_UA_multi(bonds, [BASIS] * n)
        assert np.linalg.norm(joint.amps) == pytest.approx(1, abs=1e-12)
        dist = conformation_distribution(joint)
        assert dist == pytest.approx(_branch_oracle(bonds, [BASIS] * n), abs=1e-12)

    def test_bond_count_limits(self):
        with pytest.raises(QuantumStateError):
            apply_UA_multi([], [])
        with pytest.raises(QuantumStateError):
            apply_UA_multi([BASIS.eps1] * 5, [BASIS] * 5)

    def test_span_violation(self):
        with pytest.raises(QuantumStateError):
            apply_UA_multi([BASIS.eps1, ket(BASIS.layout, {"11": 1})], [BASIS, BASIS])


class TestSwapProtocol:
    def test_rejects_ionic_component(self):
        with pytest.raises(QuantumStateError):
            swap_protocol(LIGANDS["B"])

    def test_rejects_unnormalized_x2(self):
        with pytest.raises(QuantumStateError):
            StateVector(RegisterLayout.qubits("X2"), np.array([1.0, 1.0]))

    def test_no_entanglement_to_swap(self):
        final, _ = swap_protocol(LigandProfile.from_coeffs("n", 1, 0, 0))
        assert final.equals_up_to_phase(ket(final.layout, {"01": 1}))

    def test_transcript(self):
        lig = LigandProfile.from_coeffs("p", 0.6, 0.8)
        seen = {}
        for seed in range(30):
            _, tr = swap_protocol(lig, seed=seed)
            seen[tr.outcome_label] = tr
        assert seen["+"].corrections == ("U(X1,X2)",)
        assert seen["-"].corrections == ("Z(X1)", "U(X1,X2)")
        assert seen["+"].probability == pytest.approx(0.5)

    @given(st.floats(0, math.pi / 2), st.floats(0, 2 * math.pi), st.integers(0, 10**6))
    def test_target_state(self, t, phi, seed):
        alpha, gamma = math.cos(t), math.sin(t) * complex(math.cos(phi), math.sin(phi))
        final, _ = swap_protocol(LigandProfile.from_coeffs("p", alpha, gamma), seed=seed)
        target = ket(RegisterLayout.qubits("X1", "X2"), {"01": alpha, "10": gamma})
        assert final.equals_up_to_phase(target, atol=1e-9)

    def test_swap_unitary_is_unitary(self):
        np.testing.assert_allclose(SWAP_UNITARY @ SWAP_UNITARY.conj().T, np.eye(4), atol=1e-12)

    def test_measurement_basis(self):
        b = measurement_basis(0.6, 0.8j)
        m = np.array(b)
        np.testing.assert_allclose(m.conj() @ m.T, np.eye(2), atol=1e-12)
        with pytest.raises(QuantumStateError):
            measurement_basis(0.6, 0.6)


class TestDistributeAndDecompose:
    def test_agonists(self):
        assert swap_distribute(LIGANDS["B"], BASIS).equals_up_to_phase(BASIS.eps2)
        assert swap_distribute(LIGANDS["C"], BASIS).equals_up_to_phase(BASIS.eps3)

    def test_decompose_eps3(self):
        np.testing.assert_allclose(decompose_in_eigenbasis(BASIS.eps3, BASIS), [0, 0, 1], atol=1e-12)

    def test_decompose_b(self):
        np.testing.assert_allclose(decompose_in_eigenbasis(swap_distribute(LIGANDS["B"]), BASIS), [0, 1, 0], atol=1e-12)

    def test_decompose_d(self):
        lam = decompose_in_eigenbasis(swap_distribute(LIGANDS["D"]), BASIS)
        np.testing.assert_allclose(lam, [0, 2 * math.sqrt(2) / 3, -1 / 3], atol=1e-9)

    def test_decompose_rejects_span_violation(self):
        with pytest.raises(QuantumStateError):
            decompose_in_eigenbasis(ket(BASIS.layout, {"11": 1}), BASIS)


class TestClassify:
    def test_b(self):
        out = classify(LIGANDS["B"], BASIS, 1e-6)
        assert out.verdict == "agonist" and out.index == 2
        assert out.conformation_distribution == pytest.approx((0, 1, 0))

    def test_c(self):
        out = classify(LIGANDS["C"], BASIS, 1e-6)
        assert out.verdict == "agonist" and out.index == 3

    def test_d(self):
        out = classify(LIGANDS["D"], BASIS, 1e-6)
        assert out.verdict == "antagonist"
        assert out.conformation_distribution == pytest.approx((0, 8 / 9, 1 / 9), abs=1e-12)
        assert out.coherence_residual == pytest.approx(1 / 9, abs=1e-12)

    def test_resting_state_is_not_an_agonist(self):
        out = classify(LigandProfile.from_coeffs("rest", S2, 0, -S2))
        assert out.verdict == "antagonist"
        assert out.coherence_residual == pytest.approx(0, abs=1e-12)

    def test_tolerance_range(self):
        with pytest.raises(ValueError):
            classify(LIGANDS["B"], BASIS, 0.6)

    def test_b_and_c_equal_entanglement_distinct_targets(self):
        b, c = classify(LIGANDS["B"]), classify(LIGANDS["C"])
        assert b.index != c.index
        assert eof_2q(LIGANDS["B"].state()) == pytest.approx(0.550048, abs=1e-4)
        assert eof_2q(LIGANDS["C"].state()) == pytest.approx(0.550048, abs=1e-4)

    @given(st.integers(0, 2**32 - 1))
    def test_outcome_invariants(self, seed):
        rng = np.random.default_rng(seed)
        c = rng.normal(size=3) + 1j * rng.normal(size=3)
        c /= np.linalg.norm(c)
        out = classify(LigandProfile("r", HBondAmplitudes(*c)))
        assert sum(out.conformation_distribution) == pytest.approx(1, abs=1e-9)
        assert out.coherence_residual >= 0

    def test_multi(self):
        assert classify_multi([LIGANDS["B"], LIGANDS["C"]]).index == (2, 3)
        assert classify_multi([LIGANDS["B"], LIGANDS["D"]]).verdict == "antagonist"

    def test_order_independent_fan_out(self):
        names = ["D", "B", "C"]
        with ThreadPoolExecutor(3) as pool:
            par = dict(zip(names, pool.map(lambda n: classify(LIGANDS[n]), names)))
        for n in names:
            assert par[n] == classify(LIGANDS[n])


class TestCapacity:
    @pytest.mark.parametrize("n,expected", [(1, 2), (2, 8), (3, 26)])
    def test_values(self, n, expected):
        assert capacity(n) == expected

    @pytest.mark.parametrize("n", [0, 21, 2.5])
    def test_range(self, n):
        with pytest.raises(ValueError):
            capacity(n)

    def test_min_bonds(self):
        assert min_bonds(2).exact == pytest.approx(1.0)
        assert min_bonds(4).exact == pytest.approx(1.46497, abs=1e-5)
        assert min_bonds(6).exact == pytest.approx(1.77124, abs=1e-5)
        assert min_bonds(6).rounded == 1.77

    @given(st.integers(1, 20))
    def test_inverse(self, n):
        assert min_bonds(capacity(n)).exact == pytest.approx(n)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_enumeration_matches_capacity(self, n):
        found = enumerate_agonists(n)
        assert len(found) == capacity(n)
        assert (1,) * n not in found


class TestMarginals:
    def test_b_matches_a_marginal(self):
        target = np.array([[2, 1], [1, 1]]) / 3
        first, second = reduced_marginals(LIGANDS["B"])
        assert min(np.max(np.abs(m.entries - target)) for m in (first, second)) < 1e-9

    def test_c_matches_a_marginal(self):
        target = np.array([[5, 1], [1, 1]]) / 6
        first, second = reduced_marginals(LIGANDS["C"])
        assert np.max(np.abs(first.entries - target)) < 1e-9

    def test_labels(self):
        first, second = reduced_marginals(LIGANDS["B"])
        assert first.layout.labels == ("XN",) and second.layout.labels == ("X1",)

    def test_product_ligand(self):
        for m in reduced_marginals(LigandProfile.from_coeffs("p", 1, 0, 0)):
            assert m.rank() == 1

    def test_not_perfectly_distinguishable(self):
        b = reduced_marginals(LIGANDS["B"])[1]
        c = reduced_marginals(LIGANDS["C"])[0]
        lay = RegisterLayout.qubits("q")
        assert fidelity(DensityMatrix(lay, b.entries), DensityMatrix(lay, c.entries)) > 0
