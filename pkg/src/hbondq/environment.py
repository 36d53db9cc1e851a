"""Thermal mixtures over a supplied eigensystem, and full dephasing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bonds import HBondAmplitudes, unified_state
from .qmath import (
    NORM_TOL,
    SPECTRAL_TOL,
    DensityMatrix,
    QuantumStateError,
    StateVector,
    as_density,
    mixture,
)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Mutually orthogonal levels tagged either with energies or with weights.

    Energies and inverse temperatures may use any units; only their product
    enters the Boltzmann factors.
    """

    states: tuple[StateVector, ...]
    energies: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise QuantumStateError("eigensystem has no levels")
        if (self.energies is None) == (self.weights is None):
            raise QuantumStateError("give exactly one of energies or weights")
        layout = states[0].layout
        for s in states:
            if s.layout != layout:
                raise QuantumStateError("levels live on different layouts")
        gram = np.array([[np.vdot(a.amps, b.amps) for b in states] for a in states])
        if np.max(np.abs(gram - np.eye(len(states)))) > SPECTRAL_TOL:
            raise QuantumStateError("eigenstates are not mutually orthogonal")
        object.__setattr__(self, "states", states)
        if self.energies is not None:
            e = tuple(float(x) for x in self.energies)
            if len(e) != len(states) or not all(math.isfinite(x) for x in e):
                raise QuantumStateError("need one finite energy per level")
            object.__setattr__(self, "energies", e)
        else:
            w = tuple(float(x) for x in self.weights)
            if len(w) != len(states) or any(x < 0 for x in w):
                raise QuantumStateError("need one non-negative weight per level")
            if abs(sum(w) - 1.0) > NORM_TOL:
                raise QuantumStateError(f"level weights sum to {sum(w):.12g}, not 1")
            object.__setattr__(self, "weights", w)

    @classmethod
    def from_energies(cls, energies: Sequence[float], states: Sequence[StateVector]) -> "EigenSystem":
        return cls(tuple(states), energies=tuple(energies))

    @classmethod
    def from_weights(cls, weights: Sequence[float], states: Sequence[StateVector]) -> "EigenSystem":
        return cls(tuple(states), weights=tuple(weights))

    def __len__(self):
        return len(self.states)


def boltzmann_weights(energies: Sequence[float], inverse_temperature: float) -> np.ndarray:
    """``exp(-beta E_m) / Z``, computed with the minimum energy shifted out."""
    if inverse_temperature < 0 or not math.isfinite(inverse_temperature):
        raise QuantumStateError("inverse temperature must be finite and non-negative")
    e = np.asarray(energies, dtype=float)
    x = -inverse_temperature * (e - e.min())
    w = np.exp(x)
    return w / w.sum()


def thermal_state(sys: EigenSystem, inverse_temperature: float) -> DensityMatrix:
    if sys.energies is None:
        raise QuantumStateError("thermal_state needs level energies; use thermal_state_from_weights")
    w = boltzmann_weights(sys.energies, inverse_temperature)
    return mixture(w, sys.states)


def thermal_state_from_weights(sys: EigenSystem) -> DensityMatrix:
    if sys.weights is None:
        raise QuantumStateError("eigensystem carries energies, not weights")
    return mixture(sys.weights, sys.states)


def _basis_matrix(basis, dim: int) -> np.ndarray:
    vecs = [b.amps if isinstance(b, StateVector) else np.asarray(b, dtype=complex).reshape(-1) for b in basis]
    B = np.array(vecs, dtype=complex)
    if B.shape != (dim, dim):
        raise QuantumStateError(f"dephasing basis must contain {dim} vectors of length {dim}")
    if np.max(np.abs(B.conj() @ B.T - np.eye(dim))) > NORM_TOL:
        raise QuantumStateError("dephasing basis is not orthonormal")
    return B


def dephase(rho: DensityMatrix | StateVector, basis=None) -> DensityMatrix:
    """Remove every coherence of ``rho`` in ``basis`` (default: computational).

    ``basis`` must be a complete orthonormal basis of the whole register.
    The result is ``sum_k <k|rho|k> |k><k|``.
    """
    rho = as_density(rho)
    if basis is None:
        return DensityMatrix(rho.layout, np.diag(rho.entries.diagonal().real))
    B = _basis_matrix(basis, rho.dim)
    pops = np.einsum("ki,ij,kj->k", B.conj(), rho.entries, B).real
    return DensityMatrix(rho.layout, (B.T * pops) @ B.conj())


def symmetric_hbond_levels(labels=("X1", "X2")) -> tuple[StateVector, StateVector, StateVector]:
    """Ground and two excited levels of an H-bond inside the three-configuration span.

    In terms of ``|psi1>, |psi2>, |psi3> = |10>, |01>, |00>``::

        ground = (psi1 + psi2 + psi3) / sqrt(3)
        exc1   = (psi1 + psi2 - 2 psi3) / sqrt(6)
        exc2   = (psi1 - psi2) / sqrt(2)
    """
    s3, s6, s2 = 1 / math.sqrt(3), 1 / math.sqrt(6), 1 / math.sqrt(2)
    return (
        unified_state(HBondAmplitudes(s3, s3, s3), labels),
        unified_state(HBondAmplitudes(s6, s6, -2 * s6), labels),
        unified_state(HBondAmplitudes(s2, -s2, 0.0), labels),
    )


def example_thermal_state(weights=(0.7, 0.2, 0.1)) -> DensityMatrix:
    """Gibbs mixture of :func:`symmetric_hbond_levels` with given Boltzmann factors."""
    return thermal_state_from_weights(EigenSystem.from_weights(weights, symmetric_hbond_levels()))
