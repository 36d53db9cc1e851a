"""Entanglement in hydrogen bonds and its use in ligand recognition."""

from .bonds import (
    CovalentAmplitudes,
    HBondAmplitudes,
    classical_hbond,
    covalent_hbond_electron,
    covalent_hbond_proton,
    covalent_qubit,
    covalent_qutrit,
    polarize,
    unified_state,
)
from .claims import ReproReport, reproduce_paper
from .entanglement import (
    DecompositionEnsemble,
    RoofResult,
    concurrence_2q,
    entropy_of_entanglement,
    eof_2q,
    eof_minimize,
)
from .environment import EigenSystem, dephase, thermal_state, thermal_state_from_weights
from .qmath import (
    DensityMatrix,
    QuantumStateError,
    RegisterLayout,
    StateVector,
    eig_hermitian,
    fidelity,
    ket,
    measure_projective,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from .recognition import (
    EigenBasis,
    LigandProfile,
    RecognitionOutcome,
    apply_UA,
    apply_UA_multi,
    capacity,
    classify,
    decompose_in_eigenbasis,
    min_bonds,
    reduced_marginals,
    standard_ligands,
    swap_distribute,
    swap_protocol,
)

__version__ = "0.1.0"
