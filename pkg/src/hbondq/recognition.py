"""Ligand recognition through an intramolecular H-bond and its conformations.

The receptor holds an acceptor ``X1`` and a donor ``X2`` whose joint bond
state is locked to a conformation: each conformation ``chi_j`` stabilizes
one bond eigenstate ``eps_j``.  A ligand donor ``XN`` bonds to ``X1``; the
entanglement of that bond is swapped onto ``(X2, X1)``, and the
conformational coupling then projects the bond onto the ``eps`` basis.

Two-qubit bond states use the three-configuration span

    psi1 = |10>,  psi2 = |01>,  psi3 = |00>      (donor first)

so ``|11>`` is outside the physical domain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bonds import HBondAmplitudes, unified_state
from .qmath import (
    NORM_TOL,
    DensityMatrix,
    QuantumStateError,
    RegisterLayout,
    StateVector,
    apply_operator,
    ket,
    measure_projective,
    partial_trace,
    permute,
    tensor,
)

INTRA_LABELS = ("X2", "X1")
INTER_LABELS = ("XN", "X1")
MAX_BONDS = 4
MAX_CAPACITY_BONDS = 20


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Bond eigenstates ``eps1..eps3`` of the intramolecular pair, each tied to a conformation."""

    eps1: StateVector
    eps2: StateVector
    eps3: StateVector

    def __post_init__(self):
        vs = self.vectors
        layout = vs[0].layout
        if layout.dims != (2, 2) or any(v.layout != layout for v in vs):
            raise QuantumStateError("eigenbasis states must share one two-qubit layout")
        for v in vs:
            _check_span(v)
        gram = np.array([[np.vdot(a.amps, b.amps) for b in vs] for a in vs])
        if np.max(np.abs(gram - np.eye(3))) > NORM_TOL:
            raise QuantumStateError("eigenbasis states are not orthonormal")

    @classmethod
    def default(cls, labels=INTRA_LABELS) -> "EigenBasis":
        """Resting bond ``(psi1 - psi3)/sqrt2`` plus the two ligand-matched states."""
        s2, s3, s6 = 1 / math.sqrt(2), 1 / math.sqrt(3), 1 / math.sqrt(6)
        return cls(
            psi_state((s2, 0, -s2), labels),
            psi_state((s3, s3, s3), labels),
            psi_state((s6, -2 * s6, s6), labels),
        )

    @property
    def vectors(self) -> tuple[StateVector, StateVector, StateVector]:
        return (self.eps1, self.eps2, self.eps3)

    @property
    def layout(self) -> RegisterLayout:
        return self.eps1.layout

    def projector(self, j: int) -> np.ndarray:
        v = self.vectors[j - 1].amps
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class LigandProfile:
    name: str
    coeffs: HBondAmplitudes

    @classmethod
    def from_coeffs(cls, name: str, c1, c2, c3=0.0, normalize: bool = False) -> "LigandProfile":
        if normalize:
            return cls(name, HBondAmplitudes.normalized(c1, c2, c3))
        return cls(name, HBondAmplitudes(c1, c2, c3))

    def state(self, labels=INTER_LABELS) -> StateVector:
        """Intermolecular bond state with the ligand donor first."""
        return unified_state(self.coeffs, labels)


def standard_ligands() -> dict[str, LigandProfile]:
    """Agonists B and C, and the antagonist D: same populations as C, opposite sign on ``c2``."""
    s3, s6 = 1 / math.sqrt(3), 1 / math.sqrt(6)
    return {
        "B": LigandProfile("B", HBondAmplitudes(s3, s3, s3)),
        "C": LigandProfile("C", HBondAmplitudes(s6, -2 * s6, s6)),
        "D": LigandProfile("D", HBondAmplitudes(s6, 2 * s6, s6)),
    }


def psi_state(coeffs: Sequence[complex], labels=INTRA_LABELS) -> StateVector:
    """``c1 psi1 + c2 psi2 + c3 psi3`` on a donor-first qubit pair."""
    c1, c2, c3 = coeffs
    return ket(RegisterLayout.qubits(*labels), {"10": c1, "01": c2, "00": c3})


def _check_span(state: StateVector, tol: float = NORM_TOL):
    if state.layout.dims != (2, 2):
        raise QuantumStateError(f"expected a two-qubit bond state, got {state.layout}")
    leak = abs(state.amps[state.layout.basis_index("11")])
    if leak > tol:
        raise QuantumStateError(f"bond state has weight on |11> (|amp| = {leak:.3g}); outside the bond span")


def decompose_in_eigenbasis(state: StateVector, basis: EigenBasis) -> tuple[complex, complex, complex]:
    """``lambda_j = <eps_j|state>`` for ``j = 1, 2, 3``."""
    _check_span(state)
    if state.layout.dims != basis.layout.dims:
        raise QuantumStateError("state and eigenbasis layouts differ")
    lam = tuple(complex(np.vdot(v.amps, state.amps)) for v in basis.vectors)
    total = sum(abs(x) ** 2 for x in lam)
    if abs(total - 1.0) > NORM_TOL:
        raise QuantumStateError(f"eigenbasis coefficients carry weight {total:.12g}")
    return lam


# -- conformational conditional dynamics ------------------------------------

def apply_UA(
    bond_state: StateVector,
    basis: EigenBasis | None = None,
    conformation: str = "chi",
) -> StateVector:
    """Couple a bond to a three-level conformation register.

    Returns ``sum_j (M_j |bond>) (x) |chi_j>`` with ``M_j = |eps_j><eps_j|``;
    conformation ``chi_j`` is level ``j - 1`` of the qutrit ``conformation``.
    """
    return apply_UA_multi([bond_state], [basis or EigenBasis.default(tuple(bond_state.layout.labels))],
                          conformations=[conformation])


def apply_UA_multi(
    bond_states: Sequence[StateVector],
    bases: Sequence[EigenBasis] | None = None,
    conformations: Sequence[str] | None = None,
) -> StateVector:
    """Couple ``n`` independent bonds, each to its own conformation qutrit.

    Bond ``k`` selects among conformations ``chi_{3(k-1)+1..3k}``, held in
    qutrit register ``conformations[k-1]``.  Each bond is projected
    independently, so the output is
    ``sum_{j_1..j_n} (x)_k (M^k_{j_k} |bond_k>) (x) |j_1-1, ..., j_n-1>_chi``.
    Layout: all bond qubits in input order, then the conformation qutrits.
    """
    n = len(bond_states)
    if not 1 <= n <= MAX_BONDS:
        raise QuantumStateError(f"number of bonds must be in 1..{MAX_BONDS}, got {n}")
    if bases is None:
        bases = [EigenBasis.default(tuple(s.layout.labels)) for s in bond_states]
    if len(bases) != n:
        raise QuantumStateError("need one eigenbasis per bond")
    if conformations is None:
        conformations = ["chi"] if n == 1 else [f"chi{k + 1}" for k in range(n)]
    all_labels = [lbl for s in bond_states for lbl in s.layout.labels]
    if n > 1 and len(set(all_labels)) != len(all_labels):
        bond_states = [s.relabel({lbl: f"{lbl}_{k + 1}" for lbl in s.layout.labels})
                       for k, s in enumerate(bond_states)]
    joint = None
    for s in bond_states:
        _check_span(s)
        joint = s if joint is None else tensor(joint, s)
    bond_layout = joint.layout
    out_layout = RegisterLayout(bond_layout.subsystems + tuple((c, 3) for c in conformations))
    # per bond: a (4 x 3) array whose column j is M_j |bond>
    branches = []
    for s, b in zip(bond_states, bases):
        cols = np.stack([b.projector(j) @ s.amps for j in (1, 2, 3)], axis=1)
        branches.append(cols.reshape(2, 2, 3))
    # interleave as (q1a, q1b, c1, q2a, q2b, c2, ...) then move the c axes last
    t = branches[0]
    for br in branches[1:]:
        t = np.multiply.outer(t, br)
    conf_axes = [3 * k + 2 for k in range(n)]
    bond_axes = [a for a in range(3 * n) if a not in conf_axes]
    t = t.transpose(bond_axes + conf_axes)
    return StateVector(out_layout, t.reshape(-1))


def conformation_distribution(joint: StateVector, conformations: Sequence[str] | None = None) -> dict:
    """Dephased branch weights ``{(j_1, .., j_n): p}`` over the conformation registers.

    Indices are 1-based conformation numbers within each bond.  Zero-weight
    branches are omitted.
    """
    if conformations is None:
        conformations = [lbl for lbl, d in joint.layout.subsystems if d == 3 and lbl.startswith("chi")]
    red = partial_trace(joint, conformations)
    pops = red.diagonal()
    dims = red.layout.dims
    out = {}
    for flat, p in enumerate(pops):
        if p > 1e-15:
            out[tuple(int(i) + 1 for i in np.unravel_index(flat, dims))] = float(p)
    return out


# -- entanglement swapping ------------------------------------------------------

def measurement_basis(lambda1: complex = 1 / math.sqrt(2), lambda2: complex = 1 / math.sqrt(2)):
    """``{l1|1> + l2|0>, l2*|1> - l1*|0>}`` as vectors in ``(|0>, |1>)`` components."""
    l1, l2 = complex(lambda1), complex(lambda2)
    if abs(abs(l1) ** 2 + abs(l2) ** 2 - 1.0) > NORM_TOL:
        raise QuantumStateError("|lambda1|^2 + |lambda2|^2 must be 1")
    return (np.array([l2, l1]), np.array([-l1.conjugate(), l2.conjugate()]))


PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def _swap_unitary() -> np.ndarray:
    """Joint (X1, X2) unitary taking the four half-ionic product states to the computational basis."""
    s = 1 / math.sqrt(2)
    lay = RegisterLayout.qubits("X1", "X2")

    def v(terms):
        return ket(lay, terms).amps

    pairs = [
        (v({"01": s, "00": -s}), v({"01": 1})),
        (v({"11": s, "10": s}), v({"11": 1})),
        (v({"11": s, "10": -s}), v({"10": 1})),
        (v({"01": s, "00": s}), v({"00": 1})),
    ]
    return sum(np.outer(out, inp.conj()) for inp, out in pairs)


SWAP_UNITARY = _swap_unitary()


class SwapTranscript(NamedTuple):
    outcome: int
    outcome_label: str
    probability: float
    corrections: tuple[str, ...]


def default_x2_state() -> StateVector:
    s = 1 / math.sqrt(2)
    return ket(RegisterLayout.qubits("X2"), {"1": s, "0": -s})


def swap_protocol(
    ligand: LigandProfile,
    x2_init: StateVector | None = None,
    seed: int = 0,
) -> tuple[StateVector, SwapTranscript]:
    """Move the ligand bond's entanglement from ``(XN, X1)`` onto ``(X1, X2)``.

    Steps: measure ``XN`` in the ``|+>, |->`` basis; on ``|->`` apply Pauli Z
    to ``X1``; then apply :data:`SWAP_UNITARY` to ``(X1, X2)``.  For a ligand
    ``c1|10> + c2|01>`` and the default ``X2`` state the result is
    ``c1|01> + c2|10>`` on ``(X1, X2)`` for either outcome.

    The ligand must have no ionic component (``c3 == 0``).
    """
    c = ligand.coeffs
    if abs(c.c3) > NORM_TOL:
        raise QuantumStateError(
            f"swap protocol needs c3 = 0 (no ionic term); ligand {ligand.name!r} has |c3| = {abs(c.c3):.3g}"
        )
    if x2_init is None:
        x2_init = default_x2_state()
    if x2_init.layout.dims != (2,):
        raise QuantumStateError("x2_init must be a single qubit")
    x2_init = x2_init.relabel({x2_init.layout.labels[0]: "X2"})
    phi = tensor(ligand.state(INTER_LABELS), x2_init)
    meas = measure_projective(phi, "XN", measurement_basis(), seed, discard=True)
    state = meas.post_state
    corrections = []
    if meas.outcome == 1:
        state = apply_operator(state, PAULI_Z, ["X1"])
        corrections.append("Z(X1)")
    state = apply_operator(state, SWAP_UNITARY, ["X1", "X2"])
    corrections.append("U(X1,X2)")
    state = permute(state, ["X1", "X2"])
    transcript = SwapTranscript(meas.outcome, "+-"[meas.outcome], meas.probability, tuple(corrections))
    return state, transcript


def swap_distribute(ligand: LigandProfile, basis: EigenBasis | None = None) -> StateVector:
    """Idealized endpoint of a perfect swap: ``(X2, X1)`` carries the ligand's coefficients."""
    basis = basis or EigenBasis.default()
    c = ligand.coeffs
    return psi_state((c.c1, c.c2, c.c3), basis.layout.labels)


# -- classification and capacity ------------------------------------------------

def _snap(w: float) -> float:
    # rounding noise from the basis overlaps
    return 0.0 if w < 1e-15 else w


@dataclass(frozen=True)
class RecognitionOutcome:
    """``verdict`` is ``"agonist"`` (with the 1-based eigenstate ``index``) or ``"antagonist"``."""

    verdict: str
    index: int | tuple[int, ...] | None
    conformation_distribution: tuple[float, ...]
    coherence_residual: float

    @property
    def is_agonist(self) -> bool:
        return self.verdict == "agonist"


def classify(ligand: LigandProfile, basis: EigenBasis | None = None, tol: float = 1e-6) -> RecognitionOutcome:
    """Agonist iff the swapped bond sits (within ``tol``) on one non-resting eigenstate.

    A ligand that lands on the resting state ``eps1`` triggers no
    conformational change, so it is reported as an antagonist.
    """
    if not 0 < tol < 0.5:
        raise ValueError("tol must lie in (0, 0.5)")
    basis = basis or EigenBasis.default()
    lam = decompose_in_eigenbasis(swap_distribute(ligand, basis), basis)
    weights = tuple(_snap(abs(x) ** 2) for x in lam)
    j = int(np.argmax(weights)) + 1
    top = weights[j - 1]
    residual = max(0.0, 1.0 - top)
    if top >= 1 - tol and j != 1:
        return RecognitionOutcome("agonist", j, weights, residual)
    return RecognitionOutcome("antagonist", None, weights, residual)


def classify_multi(
    ligands: Sequence[LigandProfile],
    bases: Sequence[EigenBasis] | None = None,
    tol: float = 1e-6,
) -> RecognitionOutcome:
    """Joint verdict for ``n`` independent bonds.

    Agonist iff the dephased conformation distribution puts at least
    ``1 - tol`` on a single tuple other than the all-resting one.
    ``conformation_distribution`` is flattened in row-major tuple order.
    """
    n = len(ligands)
    if bases is None:
        bases = [EigenBasis.default((f"X2_{k + 1}", f"X1_{k + 1}")) for k in range(n)]
    bonds = [swap_distribute(lig, b) for lig, b in zip(ligands, bases)]
    dist = conformation_distribution(apply_UA_multi(bonds, bases))
    flat = tuple(dist.get(t, 0.0) for t in itertools.product((1, 2, 3), repeat=n))
    best = max(dist, key=dist.get)
    residual = max(0.0, 1.0 - dist[best])
    if dist[best] >= 1 - tol and best != (1,) * n:
        return RecognitionOutcome("agonist", best, flat, residual)
    return RecognitionOutcome("antagonist", None, flat, residual)


def enumerate_agonists(n: int) -> list[tuple[int, ...]]:
    """Eigenstate tuples that drive ``n`` bonds into one definite non-resting conformation.

    Every tuple of eigenstates is pushed through :func:`apply_UA_multi`; a
    tuple counts when its conformation distribution is a single branch and
    that branch is not all-``chi1``.
    """
    if not 1 <= n <= MAX_BONDS:
        raise QuantumStateError(f"n must be in 1..{MAX_BONDS}")
    bases = [EigenBasis.default((f"X2_{k + 1}", f"X1_{k + 1}")) for k in range(n)]
    found = []
    for combo in itertools.product((1, 2, 3), repeat=n):
        bonds = [bases[k].vectors[j - 1] for k, j in enumerate(combo)]
        dist = conformation_distribution(apply_UA_multi(bonds, bases))
        if len(dist) != 1:
            continue
        branch, p = next(iter(dist.items()))
        if p > 1 - 1e-9 and branch != (1,) * n:
            found.append(branch)
    return found


def capacity(n: int) -> int:
    """Number of agonists ``3**n - 1`` distinguishable with ``n`` bonds."""
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= MAX_CAPACITY_BONDS:
        raise ValueError(f"n must be an integer in 1..{MAX_CAPACITY_BONDS}")
    return 3 ** int(n) - 1


class MinBonds(NamedTuple):
    exact: float
    rounded: float


def min_bonds(N: int) -> MinBonds:
    """Bonds needed to tell ``N`` agonists apart, ``log3(N + 1)``."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    exact = math.log(N + 1, 3)
    return MinBonds(exact, round(exact, 2))


# -- local information --------------------------------------------------------

def reduced_marginals(ligand: LigandProfile) -> tuple[DensityMatrix, DensityMatrix]:
    """Single-qubit marginals ``(keep XN, keep X1)`` of the intermolecular bond."""
    psi = ligand.state(INTER_LABELS)
    return partial_trace(psi, ["XN"]), partial_trace(psi, ["X1"])
