"""Fixed manifest of published numbers and the code that recomputes each one."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import bonds, entanglement, environment, qmath, recognition

CLAIM_TOL = 1e-4


class ClaimRow(NamedTuple):
    claim_id: str
    description: str
    published: float
    computed: float
    abs_diff: float
    passed: bool


class ReproReport(NamedTuple):
    rows: tuple[ClaimRow, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[ClaimRow]:
        return [r for r in self.rows if not r.passed]


def _eps(j: int) -> qmath.StateVector:
    return environment.symmetric_hbond_levels()[j - 1]


def _cov(beta, gamma) -> float:
    amps = bonds.CovalentAmplitudes(a=1 / math.sqrt(2), b=1 / math.sqrt(2), alpha=1 / math.sqrt(2),
                                    beta=beta, gamma=gamma)
    return entanglement.entropy_of_entanglement(bonds.covalent_qubit(amps), ["e1"])


MARGINAL_B = np.array([[2, 1], [1, 1]]) / 3
MARGINAL_C = np.array([[5, 1], [1, 1]]) / 6


def _matching_marginal(name: str, target: np.ndarray) -> qmath.DensityMatrix:
    pair = recognition.reduced_marginals(recognition.standard_ligands()[name])
    return min(pair, key=lambda m: np.max(np.abs(m.entries - target)))


def _marginal_distance(name: str, target: np.ndarray) -> float:
    return float(np.max(np.abs(_matching_marginal(name, target).entries - target)))


def _marginal_fidelity() -> float:
    b = _matching_marginal("B", MARGINAL_B).entries
    c = _matching_marginal("C", MARGINAL_C).entries
    lay = qmath.RegisterLayout.qubits("q")
    return qmath.fidelity(qmath.DensityMatrix(lay, b), qmath.DensityMatrix(lay, c))


def _swap_overlap(c1, c2, seed) -> tuple[float, float]:
    lig = recognition.LigandProfile.from_coeffs("probe", c1, c2, 0.0)
    final, tr = recognition.swap_protocol(lig, seed=seed)
    target = qmath.ket(final.layout, {"01": c1, "10": c2})
    return abs(final.inner(target)) ** 2, tr.probability


def _d_lambda(j: int) -> float:
    lig = recognition.standard_ligands()["D"]
    lam = recognition.decompose_in_eigenbasis(recognition.swap_distribute(lig), recognition.EigenBasis.default())
    return lam[j - 1].real


def _classify(name: str) -> float:
    out = recognition.classify(recognition.standard_ligands()[name])
    return float(out.index) if out.is_agonist else 0.0


def _tensor_orbital_qutrits() -> float:
    xh = qmath.ket(qmath.RegisterLayout.qutrits("X1", "H"), {"11": 1})
    x2 = qmath.ket(qmath.RegisterLayout.qutrits("X2"), {"2": 1})
    joint = qmath.tensor(xh, x2)
    expected = bonds.classical_hbond(1.0, 0.0)
    return float(abs(joint.inner(expected)) ** 2) if joint.layout.dim == 27 else 0.0


def _rho_th():
    return environment.example_thermal_state()


def _rho_d():
    return environment.dephase(_rho_th())


# (claim id, description, published value, evaluator)
MANIFEST: tuple[tuple[str, str, float, Callable[[], float]], ...] = (
    ("covalent_product", "E_F of covalent bond with beta = gamma = 0.5", 0.0, lambda: _cov(0.5, 0.5)),
    ("covalent_one_flip", "E_F after flipping the sign of beta", 1.0, lambda: _cov(-0.5, 0.5)),
    ("covalent_two_flips", "E_F after flipping beta and gamma", 0.0, lambda: _cov(-0.5, -0.5)),
    ("qutrit_pure_covalent", "E_F of alpha|11> in the orbital picture", 0.0,
     lambda: entanglement.entropy_of_entanglement(bonds.covalent_qutrit(bonds.CovalentAmplitudes()), ["X"])),
    ("tensor_orbital_qutrits", "|11>_(X1 H) x |2>_X2 is the 27-dim basis vector |112>", 1.0, _tensor_orbital_qutrits),
    ("electron_no_transfer", "E_F across sigma*|X2 with no charge transfer", 0.0,
     lambda: entanglement.entropy_of_entanglement(bonds.covalent_hbond_electron(1.0, 0.0), ["sigma*"])),
    ("proton_closed_form", "E_F of alpha|10> + delta|01> with |delta|^2 = 0.3", 0.881291,
     lambda: entanglement.eof_2q(bonds.covalent_hbond_proton(math.sqrt(0.7), math.sqrt(0.3)))),
    ("eof_eps1", "E_F of the ground level", 0.550048, lambda: entanglement.eof_2q(_eps(1))),
    ("eof_eps2", "E_F of the first excited level", 0.187299, lambda: entanglement.eof_2q(_eps(2))),
    ("eof_eps3", "E_F of the second excited level", 1.0, lambda: entanglement.eof_2q(_eps(3))),
    ("entropy_reduced_eps1", "entropy of one side of the ground level", 0.550048,
     lambda: qmath.von_neumann_entropy(qmath.partial_trace(_eps(1), ["X1"]))),
    ("eof_rho_th", "E_F of the thermal mixture {0.7, 0.2, 0.1}", 0.283771, lambda: entanglement.eof_2q(_rho_th())),
    ("eof_rho_th_roof", "convex-roof search on the thermal mixture", 0.283771,
     lambda: entanglement.eof_minimize(_rho_th(), ["X1"], seed=0).value),
    ("rho_d_diag_00", "dephased population of |00>", 22 / 60, lambda: _rho_d().diagonal()[0]),
    ("rho_d_diag_01", "dephased population of |01>", 19 / 60, lambda: _rho_d().diagonal()[1]),
    ("rho_d_diag_10", "dephased population of |10>", 19 / 60, lambda: _rho_d().diagonal()[2]),
    ("rho_d_diag_11", "dephased population of |11>", 0.0, lambda: _rho_d().diagonal()[3]),
    ("rho_d_zero_eof", "E_F of the dephased state", 0.0, lambda: entanglement.eof_2q(_rho_d())),
    ("eof_ligand_B", "E_F of the B bond", 0.550048,
     lambda: entanglement.eof_2q(recognition.standard_ligands()["B"].state())),
    ("eof_ligand_C", "E_F of the C bond", 0.550048,
     lambda: entanglement.eof_2q(recognition.standard_ligands()["C"].state())),
    ("marginal_B", "distance of (2,1;1,1)/3 to the nearest B marginal", 0.0,
     lambda: _marginal_distance("B", MARGINAL_B)),
    ("marginal_C", "distance of (5,1;1,1)/6 to the nearest C marginal", 0.0,
     lambda: _marginal_distance("C", MARGINAL_C)),
    ("marginals_overlap", "B and C marginals are not orthogonal (fidelity > 0)", 1.0,
     lambda: float(_marginal_fidelity() > 0)),
    ("swap_B_eps2", "B lands on the second eigenstate", 2.0, lambda: _classify("B")),
    ("swap_C_eps3", "C lands on the third eigenstate", 3.0, lambda: _classify("C")),
    ("classify_D_antagonist", "D is not an agonist", 0.0, lambda: _classify("D")),
    ("decompose_D_eps1", "D component on eps1", 0.0, lambda: _d_lambda(1)),
    ("decompose_D_eps2", "D component on eps2", 2 * math.sqrt(2) / 3, lambda: _d_lambda(2)),
    ("decompose_D_eps3", "D component on eps3", -1 / 3, lambda: _d_lambda(3)),
    ("swap_target_state", "overlap of swapped state with alpha|01> + gamma|10>", 1.0,
     lambda: _swap_overlap(0.6, 0.8, 0)[0]),
    ("measurement_prob", "probability of each XN outcome", 0.5, lambda: _swap_overlap(0.6, 0.8, 0)[1]),
    ("capacity_n1", "agonists with one bond", 2.0, lambda: recognition.capacity(1)),
    ("capacity_n2", "agonists with two bonds", 8.0, lambda: recognition.capacity(2)),
    ("capacity_n3", "agonists with three bonds", 26.0, lambda: recognition.capacity(3)),
    ("min_bonds_N4", "bonds needed for four agonists", 1.47, lambda: recognition.min_bonds(4).rounded),
    ("min_bonds_N6", "bonds needed for six agonists", 1.77, lambda: recognition.min_bonds(6).rounded),
)


def claim_ids() -> list[str]:
    return [c[0] for c in MANIFEST]


def reproduce_paper(tol: float = CLAIM_TOL) -> ReproReport:
    """Evaluate every manifest entry; an evaluator that raises yields a failed row."""
    rows = []
    for cid, desc, published, fn in MANIFEST:
        try:
            value = float(np.real(fn()))
        except (qmath.QuantumStateError, ValueError, ArithmeticError, np.linalg.LinAlgError):
            value = math.nan
        diff = abs(value - published)
        rows.append(ClaimRow(cid, desc, published, value, diff, bool(diff <= tol)))
    return ReproReport(tuple(rows))
