"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from conftest import random_span_state, random_state, random_unitary
from hbondq.bonds import CovalentAmplitudes, covalent_qubit
from hbondq.entanglement import concurrence_2q, entropy_of_entanglement, eof_2q, eof_minimize
from hbondq.environment import dephase, example_thermal_state, symmetric_hbond_levels
from hbondq.qmath import DensityMatrix, RegisterLayout, ket, mixture
from hbondq.recognition import (
    EigenBasis,
    LigandProfile,
    apply_UA,
    capacity,
    classify,
    decompose_in_eigenbasis,
    enumerate_agonists,
    min_bonds,
    reduced_marginals,
    standard_ligands,
    swap_distribute,
    swap_protocol,
)
from hbondq.qmath import fidelity

S2 = 1 / math.sqrt(2)


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_level_entanglement(report):
    t0 = time.perf_counter()
    values = [eof_2q(s) for s in symmetric_hbond_levels()]
    elapsed = time.perf_counter() - t0
    target = [0.550048, 0.187299, 1.0]
    ok = all(abs(v - t) <= 1e-4 for v, t in zip(values, target)) and elapsed < 1.0
    report(1, ok, f"E_F levels = {[round(v, 6) for v in values]} vs {target}, {elapsed * 1e3:.1f} ms")


def test_criterion_2_thermal_entanglement(report):
    rho = example_thermal_state((0.7, 0.2, 0.1))
    closed = eof_2q(rho)
    roof = eof_minimize(rho, ["X1"], seed=0).value
    ok = abs(closed - 0.283771) <= 1e-4 and abs(roof - closed) <= 1e-3
    report(2, ok, f"closed form {closed:.6f}, roof search {roof:.6f}, target 0.283771")


def test_criterion_3_dephasing(report):
    rho_d = dephase(example_thermal_state())
    target = np.diag([22, 19, 19, 0]) / 60
    err = float(np.max(np.abs(rho_d.entries - target)))
    e = eof_2q(rho_d)
    report(3, err <= 1e-9 and abs(e) <= 1e-9, f"max |rho_d - diag(22,19,19,0)/60| = {err:.1e}, E_F = {e:.1e}")


def test_criterion_4_sign_flips(report):
    got = []
    for beta, gamma in [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5)]:
        psi = covalent_qubit(CovalentAmplitudes(S2, S2, S2, beta, gamma))
        got.append(entropy_of_entanglement(psi, ["e1"]))
    ok = all(abs(g - t) <= 1e-9 for g, t in zip(got, [0, 1, 0]))
    report(4, ok, f"E_F = {[round(g, 12) for g in got]} vs [0, 1, 0]")


def test_criterion_5_swap_protocol(report):
    rng = np.random.default_rng(2024)
    outcomes = set()
    worst_state = worst_eof = 0.0
    for seed in range(100):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        alpha, gamma = z / np.linalg.norm(z)
        lig = LigandProfile.from_coeffs("r", alpha, gamma)
        final, tr = swap_protocol(lig, seed=seed)
        outcomes.add(tr.outcome)
        target = ket(RegisterLayout.qubits("X1", "X2"), {"01": alpha, "10": gamma})
        worst_state = max(worst_state, 1 - abs(final.inner(target)))
        worst_eof = max(worst_eof, abs(eof_2q(lig.state()) - eof_2q(final)))
    ok = outcomes == {0, 1} and worst_state <= 1e-9 and worst_eof <= 1e-9
    report(5, ok, f"outcomes seen {sorted(outcomes)}, worst 1-|overlap| {worst_state:.1e}, worst E_F drift {worst_eof:.1e}")


def test_criterion_6_antagonist(report):
    basis = EigenBasis.default()
    d = standard_ligands()["D"]
    lam = np.array(decompose_in_eigenbasis(swap_distribute(d, basis), basis))
    err = float(np.max(np.abs(lam - [0, 2 * math.sqrt(2) / 3, -1 / 3])))
    out = classify(d, basis, 1e-6)
    w_err = float(np.max(np.abs(np.array(out.conformation_distribution) - [0, 8 / 9, 1 / 9])))
    ok = err <= 1e-9 and out.verdict == "antagonist" and w_err <= 1e-9
    report(6, ok, f"lambda error {err:.1e}, verdict {out.verdict}, weight error {w_err:.1e}")


def test_criterion_7_marginals(report):
    lig = standard_ligands()
    targets = {"B": np.array([[2, 1], [1, 1]]) / 3, "C": np.array([[5, 1], [1, 1]]) / 6}
    matched = {}
    for name, t in targets.items():
        pair = reduced_marginals(lig[name])
        dist = [float(np.max(np.abs(m.entries - t))) for m in pair]
        k = int(np.argmin(dist))
        matched[name] = (pair[k], dist[k], ("keep first", "keep second")[k])
    lay = RegisterLayout.qubits("q")
    f = fidelity(DensityMatrix(lay, matched["B"][0].entries), DensityMatrix(lay, matched["C"][0].entries))
    ok = matched["B"][1] <= 1e-9 and matched["C"][1] <= 1e-9 and f > 0
    report(7, ok, f"B matches {matched['B'][2]}, C matches {matched['C'][2]}, fidelity {f:.6f}")


def test_criterion_8_capacity(report):
    caps = tuple(capacity(n) for n in (1, 2, 3))
    n4, n6 = min_bonds(4), min_bonds(6)
    agonists = enumerate_agonists(2)
    ok = caps == (2, 8, 26) and n4.rounded == 1.47 and n6.rounded == 1.77 and len(agonists) == 8
    report(8, ok, f"capacity {caps}, min_bonds(4) = {n4.exact:.5f} -> {n4.rounded}, "
                  f"min_bonds(6) = {n6.exact:.5f} -> {n6.rounded}, n=2 agonists {len(agonists)}")


def test_criterion_9_properties(report):
    rng = np.random.default_rng(7)
    two = RegisterLayout.qubits("A", "B")

    lu = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 5))
        rho = mixture(rng.dirichlet(np.ones(k)), [random_state(rng, two) for _ in range(k)])
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        lu = max(lu, abs(concurrence_2q(DensityMatrix(two, u @ rho.entries @ u.conj().T)) - concurrence_2q(rho)))

    roof = 0.0
    for _ in range(50):
        r = int(rng.integers(1, 5))
        g = rng.normal(size=(4, r)) + 1j * rng.normal(size=(4, r))
        rho = DensityMatrix(two, g @ g.conj().T / np.trace(g @ g.conj().T).real)
        roof = max(roof, abs(eof_minimize(rho, ["A"], seed=int(rng.integers(2**31))).value - eof_2q(rho)))

    basis = EigenBasis.default()
    ua = 0.0
    for _ in range(100):
        a, b = random_span_state(rng), random_span_state(rng)
        ua = max(ua, abs(abs(np.vdot(apply_UA(a, basis).amps, apply_UA(b, basis).amps)) - abs(np.vdot(a.amps, b.amps))))

    idem = mono = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 5))
        rho = mixture(rng.dirichlet(np.ones(k)), [random_state(rng, two) for _ in range(k)])
        once = dephase(rho)
        idem = max(idem, float(np.max(np.abs(dephase(once).entries - once.entries))))
        mono = max(mono, eof_2q(once) - eof_2q(rho))

    ok = lu <= 1e-8 and roof <= 1e-4 and ua <= 1e-9 and idem == 0 and mono <= 1e-8
    report(9, ok, f"LU invariance {lu:.1e}, roof vs closed form {roof:.1e}, U_A overlap {ua:.1e}, "
                  f"dephase idempotence {idem:.1e}, E_F increase under dephasing {mono:.1e}")
