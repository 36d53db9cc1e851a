"""Entanglement of formation and the quantities it is built from.

Three routes are provided:

* :func:`entropy_of_entanglement` for pure states (Schmidt spectrum),
* :func:`concurrence_2q` / :func:`eof_2q`, the closed form for two qubits,
* :func:`eof_minimize`, a direct numerical search over pure-state
  decompositions for any bipartition of a small register.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _roof
from .qmath import (
    NORM_TOL,
    SPECTRAL_TOL,
    DensityMatrix,
    QuantumStateError,
    RegisterLayout,
    StateVector,
    as_density,
    mixture,
)

MAX_ROOF_DIM = 81

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _bipartition(layout: RegisterLayout, cut: Iterable[str]) -> tuple[list[str], int, int]:
    """Labels reordered side-A-first, plus the two side dimensions."""
    side = set(cut)
    for lbl in side:
        layout.index(lbl)
    if not side or side == set(layout.labels):
        raise QuantumStateError("cut must leave subsystems on both sides")
    a = [lbl for lbl in layout.labels if lbl in side]
    b = [lbl for lbl in layout.labels if lbl not in side]
    da = math.prod(layout.dim_of(lbl) for lbl in a)
    db = math.prod(layout.dim_of(lbl) for lbl in b)
    return a + b, da, db


def _axes(layout: RegisterLayout, order: Sequence[str]) -> list[int]:
    return [layout.index(lbl) for lbl in order]


def _clamp(value: float, da: int, db: int) -> float:
    return min(max(value, 0.0), math.log2(min(da, db)))


def entropy_of_entanglement(psi: StateVector, cut: Iterable[str]) -> float:
    """Von Neumann entropy (bits) of either side of a pure bipartite state.

    ``cut`` names the subsystems on one side; the rest form the other side.
    """
    order, da, db = _bipartition(psi.layout, cut)
    m = psi.tensor_view().transpose(_axes(psi.layout, order)).reshape(da, db)
    s = np.linalg.svd(m, compute_uv=False) ** 2
    s = s[s > 0]
    return _clamp(float(-np.sum(s * np.log2(s))), da, db)


def _two_qubit_matrix(rho) -> np.ndarray:
    rho = as_density(rho)
    if rho.layout.dims != (2, 2):
        raise QuantumStateError(f"expected a two-qubit state, got layout {rho.layout}")
    return rho.entries


def concurrence_2q(rho: DensityMatrix | StateVector) -> float:
    """Wootters concurrence of a two-qubit state.

    With ``rho = F F^dagger`` for the eigen-factor ``F = V sqrt(W)`` (null
    directions dropped), the spin-flip spectrum ``lambda_i`` is the set of
    singular values of the symmetric matrix ``F^T (Y x Y) F``.  This avoids
    square roots of rounding-level eigenvalues of ``rho rho~``.
    """
    m = _two_qubit_matrix(rho)
    w, v = np.linalg.eigh(m)
    keep = w > 1e-15
    f = v[:, keep] * np.sqrt(w[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(f.T @ _YY @ f, compute_uv=False)
    lam[: len(sv)] = sv
    lam = np.sort(lam)[::-1]
    return float(min(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0), 1.0))


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def eof_2q(rho: DensityMatrix | StateVector) -> float:
    """Entanglement of formation (bits) of a two-qubit state, closed form."""
    return _clamp(eof_from_concurrence(concurrence_2q(rho)), 2, 2)


@dataclass(frozen=True, eq=False)
class DecompositionEnsemble:
    """A pure-state decomposition ``{(p_i, psi_i)}`` of a mixed state."""

    members: tuple[tuple[float, StateVector], ...]

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        if not members:
            raise QuantumStateError("ensemble is empty")
        if any(w < 0 for w, _ in members):
            raise QuantumStateError("ensemble weights must be non-negative")
        total = sum(w for w, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise QuantumStateError(f"ensemble weights sum to {total:.12g}")
        layout = members[0][1].layout
        if any(s.layout != layout for _, s in members):
            raise QuantumStateError("ensemble members live on different layouts")
        object.__setattr__(self, "members", members)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.members])

    @property
    def states(self) -> list[StateVector]:
        return [s for _, s in self.members]

    def density_matrix(self) -> DensityMatrix:
        return mixture(self.weights, self.states)

    def reconstruction_error(self, rho: DensityMatrix) -> float:
        return float(np.max(np.abs(self.density_matrix().entries - rho.entries)))

    def average_entanglement(self, cut: Iterable[str]) -> float:
        cut = list(cut)
        return sum(w * entropy_of_entanglement(s, cut) for w, s in self.members)

    def __len__(self):
        return len(self.members)


class RoofResult(NamedTuple):
    value: float
    witness: DecompositionEnsemble
    converged: bool
    sweeps: int


def eigen_ensemble(rho: DensityMatrix, tol: float = 1e-12) -> DecompositionEnsemble:
    """The spectral decomposition of ``rho`` as an ensemble."""
    w, v = np.linalg.eigh(rho.entries)
    keep = w > tol
    w = w[keep] / w[keep].sum()
    members = tuple(
        (float(p), StateVector.from_amplitudes(rho.layout, v[:, k], normalize=True))
        for p, k in zip(w, np.flatnonzero(keep))
    )
    return DecompositionEnsemble(members)


def _permuted_entries(rho: DensityMatrix, order: Sequence[str]) -> np.ndarray:
    dims = rho.layout.dims
    n = len(dims)
    ax = _axes(rho.layout, order)
    t = rho.entries.reshape(dims + dims).transpose(ax + [n + i for i in ax])
    return t.reshape(rho.dim, rho.dim)


def eof_minimize(
    rho: DensityMatrix | StateVector,
    cut: Iterable[str],
    *,
    ensemble_size: int | None = None,
    restarts: int = 5,
    max_iters: int = 200,
    seed: int = 0,
    tol: float = 1e-7,
    workers: int | None = None,
) -> RoofResult:
    """Numerically minimize the average entanglement over decompositions of ``rho``.

    Every ensemble of ``rho`` with ``m`` members is ``P = U sqrt(L) V^T`` for
    an ``m x r`` isometry ``U`` acting on the spectral data ``(L, V)``.  The
    search starts from seeded random isometries and refines them with
    two-member Givens rotations until a full sweep gains less than ``tol``.
    ``max_iters`` caps the sweeps of each restart; if any restart hits the
    cap the result is returned with ``converged=False``.

    Parameters
    ----------
    rho : DensityMatrix or StateVector
        State to analyse; total dimension at most 81.
    cut : iterable of str
        Labels of one side of the bipartition.
    ensemble_size : int, optional
        Number of ensemble members; defaults to ``rank(rho)**2``.
    restarts : int
        Independent random starts; the best one wins.
    workers : int, optional
        Run restarts in a thread pool.  The result does not depend on it.

    Returns
    -------
    RoofResult
        ``(value, witness, converged, sweeps)``.  ``witness`` reproduces
        ``rho`` and attains ``value``, which never exceeds the average over
        the spectral decomposition.
    """
    rho = as_density(rho)
    if rho.dim > MAX_ROOF_DIM:
        raise QuantumStateError(f"register dimension {rho.dim} exceeds {MAX_ROOF_DIM}")
    cut = list(cut)
    order, da, db = _bipartition(rho.layout, cut)
    if restarts < 1 or max_iters < 1:
        raise ValueError("restarts and max_iters must be positive")

    trivial = eigen_ensemble(rho)
    trivial_value = trivial.average_entanglement(cut)
    rank = len(trivial)
    if rank == 1:
        return RoofResult(_clamp(trivial_value, da, db), trivial, True, 0)
    m = ensemble_size or rank * rank
    if m < rank:
        raise ValueError(f"ensemble_size {m} is below rank {rank}")

    w, v = np.linalg.eigh(_permuted_entries(rho, order))
    keep = w > 1e-12
    spectral = np.sqrt(w[keep])[:, None] * v[:, keep].T

    seeds = np.random.SeedSequence(seed).spawn(restarts)

    def one(ss):
        return _roof.search(spectral, da, db, m, np.random.default_rng(ss), max_iters, tol)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(ss) for ss in seeds]

    best = min(range(restarts), key=lambda i: (runs[i].value, i))
    converged = all(r.converged for r in runs)
    sweeps = sum(r.sweeps for r in runs)

    witness = _ensemble_from_rows(runs[best].rows, rho.layout, order, da, db)
    value = witness.average_entanglement(cut)
    if value > trivial_value or witness.reconstruction_error(rho) > SPECTRAL_TOL:
        witness, value = trivial, trivial_value
    return RoofResult(_clamp(value, da, db), witness, converged, sweeps)


def _ensemble_from_rows(rows: np.ndarray, layout: RegisterLayout, order, da, db) -> DecompositionEnsemble:
    norms2 = np.sum(np.abs(rows) ** 2, axis=1)
    keep = norms2 > 1e-14
    rows, norms2 = rows[keep], norms2[keep]
    weights = norms2 / norms2.sum()
    # undo the side-A-first permutation
    perm_dims = [layout.dim_of(lbl) for lbl in order]
    inv = np.argsort(_axes(layout, order))
    members = []
    for p, r in zip(weights, rows):
        t = (r / np.linalg.norm(r)).reshape(perm_dims).transpose(inv).reshape(-1)
        members.append((float(p), StateVector.from_amplitudes(layout, t, normalize=True)))
    return DecompositionEnsemble(tuple(members))
