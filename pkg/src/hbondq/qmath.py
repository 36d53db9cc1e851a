"""Dense state primitives for small registers of qubits and qutrits.

Everything here works on plain numpy arrays wrapped in three immutable
value types: :class:`RegisterLayout`, :class:`StateVector` and
:class:`DensityMatrix`.  The layout fixes the tensor ordering, so every
function that touches subsystems addresses them by label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-9
SPECTRAL_TOL = 1e-8
ALLOWED_DIMS = (2, 3)


class QuantumStateError(ValueError):
    """Raised when an input violates a state or layout invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered subsystems ``(label, dim)``; the order is the tensor order."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        subs = tuple((str(lbl), int(d)) for lbl, d in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        if not subs:
            raise QuantumStateError("layout needs at least one subsystem")
        labels = [lbl for lbl, _ in subs]
        if len(set(labels)) != len(labels):
            raise QuantumStateError(f"duplicate labels in layout: {labels}")
        for lbl, d in subs:
            if d not in ALLOWED_DIMS:
                raise QuantumStateError(f"subsystem {lbl!r} has dim {d}; only 2 or 3 allowed")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "RegisterLayout":
        return cls(tuple(pairs))

    @classmethod
    def qubits(cls, *labels: str) -> "RegisterLayout":
        return cls(tuple((lbl, 2) for lbl in labels))

    @classmethod
    def qutrits(cls, *labels: str) -> "RegisterLayout":
        return cls(tuple((lbl, 3) for lbl in labels))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise QuantumStateError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def select(self, labels: Iterable[str]) -> "RegisterLayout":
        """Sub-layout of ``labels``, kept in this layout's order."""
        wanted = set(labels)
        for lbl in wanted:
            self.index(lbl)
        return RegisterLayout(tuple(s for s in self.subsystems if s[0] in wanted))

    def basis_index(self, digits: str | Sequence[int]) -> int:
        """Flat index of a computational basis ket such as ``"102"``."""
        if isinstance(digits, str):
            digits = [int(ch) for ch in digits]
        if len(digits) != len(self.subsystems):
            raise QuantumStateError(f"basis label {digits} does not match {len(self.subsystems)} subsystems")
        for n, d in zip(digits, self.dims):
            if not 0 <= n < d:
                raise QuantumStateError(f"basis digit {n} out of range for dim {d}")
        return int(np.ravel_multi_index(tuple(digits), self.dims))

    def __str__(self):
        return "(" + ", ".join(f"{lbl}:{d}" for lbl, d in self.subsystems) + ")"


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state on ``layout``."""

    layout: RegisterLayout
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (self.layout.dim,):
            raise QuantumStateError(f"expected {self.layout.dim} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise QuantumStateError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise QuantumStateError(f"state is not normalized (|psi|^2 = {norm2:.12g})")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, layout: RegisterLayout, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if normalize:
            n = np.linalg.norm(amps)
            if n == 0:
                raise QuantumStateError("cannot normalize the zero vector")
            amps = amps / n
        return cls(layout, amps)

    @classmethod
    def basis(cls, layout: RegisterLayout, digits: str | Sequence[int]) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=complex)
        amps[layout.basis_index(digits)] = 1.0
        return cls(layout, amps)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.layout.dims)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.amps, self.amps.conj()))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``; layouts must agree."""
        _require_same_layout(self.layout, other.layout)
        return complex(np.vdot(self.amps, other.amps))

    def equals_up_to_phase(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return abs(abs(self.inner(other)) - 1.0) <= atol

    def relabel(self, mapping: Mapping[str, str]) -> "StateVector":
        subs = tuple((mapping.get(lbl, lbl), d) for lbl, d in self.layout.subsystems)
        return StateVector(RegisterLayout(subs), self.amps)

    def __repr__(self):
        return f"StateVector({self.layout}, {np.array2string(self.amps, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator on ``layout``."""

    layout: RegisterLayout
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        n = self.layout.dim
        if m.shape != (n, n):
            raise QuantumStateError(f"expected a {n}x{n} matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise QuantumStateError("density matrix entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise QuantumStateError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise QuantumStateError(f"density matrix trace is {tr:.12g}, not 1")
        m = (m + m.conj().T) / 2
        if np.linalg.eigvalsh(m)[0] < -NORM_TOL:
            raise QuantumStateError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.layout.dim

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def rank(self, tol: float = 1e-12) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.entries) > tol))

    def __repr__(self):
        return f"DensityMatrix({self.layout}, {np.array2string(self.entries, precision=4)})"


def _require_same_layout(a: RegisterLayout, b: RegisterLayout):
    if a != b:
        raise QuantumStateError(f"layout mismatch: {a} vs {b}")


def as_density(state: StateVector | DensityMatrix) -> DensityMatrix:
    return state.density_matrix() if isinstance(state, StateVector) else state


def ket(layout: RegisterLayout, terms: Mapping[str, complex], normalize: bool = False) -> StateVector:
    """Build a state from a ``{basis_label: amplitude}`` mapping.

    >>> ket(RegisterLayout.qubits("a", "b"), {"01": 1}).amps.tolist()
    [0j, (1+0j), 0j, 0j]
    """
    amps = np.zeros(layout.dim, dtype=complex)
    for digits, c in terms.items():
        amps[layout.basis_index(digits)] += complex(c)
    return StateVector.from_amplitudes(layout, amps, normalize=normalize)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    clash = set(a.layout.labels) & set(b.layout.labels)
    if clash:
        raise QuantumStateError(f"label collision in tensor product: {sorted(clash)}")
    layout = RegisterLayout(a.layout.subsystems + b.layout.subsystems)
    return StateVector(layout, np.kron(a.amps, b.amps))


def tensor_all(states: Sequence[StateVector]) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def partial_trace(rho: DensityMatrix | StateVector, keep: Iterable[str]) -> DensityMatrix:
    """Reduced state on ``keep``; the result keeps the original subsystem order."""
    keep = set(keep)
    if not keep:
        raise QuantumStateError("partial_trace needs at least one subsystem to keep")
    kept_layout = rho.layout.select(keep)
    dims = rho.layout.dims
    n = len(dims)
    keep_idx = [i for i, lbl in enumerate(rho.layout.labels) if lbl in keep]
    drop_idx = [i for i in range(n) if i not in keep_idx]
    if isinstance(rho, StateVector):
        # pure input: reduce the amplitude tensor without forming |psi><psi|
        m = rho.tensor_view().transpose(keep_idx + drop_idx).reshape(kept_layout.dim, -1)
        return DensityMatrix(kept_layout, m @ m.conj().T)
    t = rho.entries.reshape(dims + dims)
    # bring kept row/col axes to the front, traced row/col axes to the back
    t = t.transpose(keep_idx + [n + i for i in keep_idx] + drop_idx + [n + i for i in drop_idx])
    dk = kept_layout.dim
    dd = rho.dim // dk
    t = t.reshape(dk, dk, dd, dd)
    red = np.trace(t, axis1=2, axis2=3)
    return DensityMatrix(kept_layout, red)


def permute(psi: StateVector, order: Sequence[str]) -> StateVector:
    """Reorder the subsystems of ``psi`` to ``order``."""
    if sorted(order) != sorted(psi.layout.labels):
        raise QuantumStateError(f"{list(order)} is not a permutation of {psi.layout.labels}")
    axes = [psi.layout.index(lbl) for lbl in order]
    layout = RegisterLayout(tuple(psi.layout.subsystems[i] for i in axes))
    return StateVector(layout, psi.tensor_view().transpose(axes).reshape(-1))


def apply_operator(psi: StateVector, op, targets: Sequence[str]) -> StateVector:
    """Apply a unitary ``op`` acting on the subsystems ``targets`` (in that order)."""
    targets = list(targets)
    idx = [psi.layout.index(t) for t in targets]
    tdims = [psi.layout.dims[i] for i in idx]
    dt = math.prod(tdims)
    op = np.asarray(op, dtype=complex)
    if op.shape != (dt, dt):
        raise QuantumStateError(f"operator shape {op.shape} does not match targets of dim {dt}")
    n = len(psi.layout.dims)
    rest = [i for i in range(n) if i not in idx]
    t = psi.tensor_view().transpose(idx + rest).reshape(dt, -1)
    t = (op @ t).reshape(tdims + [psi.layout.dims[i] for i in rest])
    inv = np.argsort(idx + rest)
    return StateVector(psi.layout, t.transpose(inv).reshape(-1))


class Eigensystem(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def eig_hermitian(m: DensityMatrix | np.ndarray, tol: float = NORM_TOL) -> Eigensystem:
    """Eigenvalues in descending order with orthonormal eigenvector columns."""
    a = m.entries if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise QuantumStateError("eig_hermitian needs a square matrix")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * max(1.0, float(np.max(np.abs(a), initial=0.0))):
        raise QuantumStateError("matrix is not Hermitian")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return Eigensystem(w[::-1].copy(), v[:, ::-1].copy())


def _clamped_spectrum(values: np.ndarray) -> np.ndarray:
    if np.any(values < -NORM_TOL):
        raise QuantumStateError(f"spectrum has negative entries beyond round-off: {values.min():.3g}")
    return np.clip(values, 0.0, None)


def shannon_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: DensityMatrix | StateVector) -> float:
    """Entropy in bits; zero eigenvalues contribute nothing."""
    rho = as_density(rho)
    lam = _clamped_spectrum(eig_hermitian(rho).values)
    s = shannon_bits(lam)
    return min(max(s, 0.0), math.log2(rho.dim))


def _local_basis_matrix(basis, d: int) -> np.ndarray:
    vecs = []
    for b in basis:
        v = b.amps if isinstance(b, StateVector) else np.asarray(b, dtype=complex).reshape(-1)
        vecs.append(v)
    B = np.array(vecs, dtype=complex)
    if B.shape != (d, d):
        raise QuantumStateError(f"measurement basis must hold {d} vectors of length {d}")
    if np.max(np.abs(B.conj() @ B.T - np.eye(d))) > NORM_TOL:
        raise QuantumStateError("measurement basis is not orthonormal")
    return B


class Measurement(NamedTuple):
    outcome: int
    post_state: StateVector
    probability: float


def branch_probabilities(psi: StateVector, subsystem: str, basis) -> np.ndarray:
    """Born probabilities of every outcome of a local projective measurement."""
    i = psi.layout.index(subsystem)
    d = psi.layout.dims[i]
    B = _local_basis_matrix(basis, d)
    t = np.moveaxis(psi.tensor_view(), i, 0).reshape(d, -1)
    proj = B.conj() @ t
    return np.sum(np.abs(proj) ** 2, axis=1)


def measure_projective(
    psi: StateVector,
    subsystem: str,
    basis,
    rng_seed: int,
    discard: bool = False,
) -> Measurement:
    """Measure one subsystem of ``psi`` in an orthonormal local ``basis``.

    The outcome is sampled from the Born distribution with a generator
    seeded by ``rng_seed``.  The returned post-state is the normalized
    projection; with ``discard=True`` the measured subsystem is removed
    from it instead of being left in the selected basis vector.
    """
    i = psi.layout.index(subsystem)
    d = psi.layout.dims[i]
    B = _local_basis_matrix(basis, d)
    t = np.moveaxis(psi.tensor_view(), i, 0).reshape(d, -1)
    proj = B.conj() @ t
    probs = np.sum(np.abs(proj) ** 2, axis=1)
    probs = probs / probs.sum()
    rng = np.random.default_rng(rng_seed)
    k = int(rng.choice(d, p=probs))
    p = float(probs[k])
    if p <= 0.0:
        raise QuantumStateError("sampled a zero-probability measurement branch")
    rest = proj[k] / math.sqrt(p)
    rest_subs = tuple(s for j, s in enumerate(psi.layout.subsystems) if j != i)
    if discard:
        if not rest_subs:
            raise QuantumStateError("cannot discard the only subsystem")
        post = StateVector(RegisterLayout(rest_subs), rest)
    else:
        full = np.tensordot(B[k], rest.reshape(1, -1), axes=0).reshape((d,) + tuple(s[1] for s in rest_subs))
        full = np.moveaxis(full, 0, i)
        post = StateVector(psi.layout, full.reshape(-1))
    return Measurement(k, post, p)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    # eigenvalues at rounding level would otherwise contribute ~sqrt(eps)
    w = np.where(w > 1e-13, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix | StateVector, sigma: DensityMatrix | StateVector) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Evaluated as the squared nuclear norm of ``sqrt(rho) sqrt(sigma)``.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    _require_same_layout(rho.layout, sigma.layout)
    sv = np.linalg.svd(_psd_sqrt(rho.entries) @ _psd_sqrt(sigma.entries), compute_uv=False)
    f = float(np.sum(sv) ** 2)
    return min(max(f, 0.0), 1.0)


def mixture(weights: Sequence[float], states: Sequence[StateVector]) -> DensityMatrix:
    """``sum_i w_i |psi_i><psi_i|`` for a normalized weight vector."""
    if len(weights) != len(states) or not states:
        raise QuantumStateError("weights and states must be non-empty and equally long")
    layout = states[0].layout
    m = np.zeros((layout.dim, layout.dim), dtype=complex)
    for w, s in zip(weights, states):
        _require_same_layout(layout, s.layout)
        m += w * np.outer(s.amps, s.amps.conj())
    return DensityMatrix(layout, m)
