"""Bond-state constructors in the qubit and qutrit occupation pictures.

Amplitudes are direct inputs; nothing here models how they depend on bond
length or angle.  Qutrit levels ``|0>, |1>, |2>`` count the electrons in an
orbital.  Qubit levels in the proton picture mark whether an atom holds the
hydrogen (``|1>``) or not (``|0>``).

A caveat on :func:`covalent_qubit`: the two electrons are identical, so the
labeled two-qubit entanglement it carries (e.g. one full bit for
``(|01> + |10>)/sqrt(2)``) is not a usable resource.  The qutrit picture of
:func:`covalent_qutrit` avoids that artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import QuantumStateError, RegisterLayout, StateVector, ket

AMP_TOL = 1e-9


def _amp(x) -> complex:
    c = complex(x)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise QuantumStateError(f"amplitude {x!r} is not finite")
    return c


def _check_norm(name: str, *amps: complex, tol: float = AMP_TOL):
    total = sum(abs(a) ** 2 for a in amps)
    if abs(total - 1.0) > tol:
        raise QuantumStateError(f"{name}: squared amplitudes sum to {total:.12g}, expected 1")


@dataclass(frozen=True)
class CovalentAmplitudes:
    """Amplitudes of a single covalent bond X-Y.

    ``a, b`` weight the two electron placements inside the covalent term,
    ``alpha`` the covalent term itself and ``beta``/``gamma`` the two ionic
    structures (X anion / Y anion).
    """

    a: complex = 1 / math.sqrt(2)
    b: complex = 1 / math.sqrt(2)
    alpha: complex = 1.0
    beta: complex = 0.0
    gamma: complex = 0.0

    def __post_init__(self):
        for f in ("a", "b", "alpha", "beta", "gamma"):
            object.__setattr__(self, f, _amp(getattr(self, f)))
        _check_norm("|a|^2 + |b|^2", self.a, self.b)
        _check_norm("|alpha|^2 + |beta|^2 + |gamma|^2", self.alpha, self.beta, self.gamma)

    @property
    def ionic_character(self) -> float:
        return abs(self.beta) ** 2 + abs(self.gamma) ** 2


@dataclass(frozen=True)
class HBondAmplitudes:
    """Coefficients ``(c1, c2, c3)`` on the neutral, delocalized and ionic configurations."""

    c1: complex
    c2: complex
    c3: complex = 0.0
    mode: str = "proton"

    def __post_init__(self):
        if self.mode not in ("electron", "proton"):
            raise QuantumStateError(f"mode must be 'electron' or 'proton', got {self.mode!r}")
        for f in ("c1", "c2", "c3"):
            object.__setattr__(self, f, _amp(getattr(self, f)))
        _check_norm("|c1|^2 + |c2|^2 + |c3|^2", self.c1, self.c2, self.c3)

    @classmethod
    def normalized(cls, c1, c2, c3=0.0, mode: str = "proton") -> "HBondAmplitudes":
        v = np.array([c1, c2, c3], dtype=complex)
        n = np.linalg.norm(v)
        if n == 0:
            raise QuantumStateError("all coefficients are zero")
        v = v / n
        return cls(v[0], v[1], v[2], mode)

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)


def covalent_qubit(amps: CovalentAmplitudes, labels=("e1", "e2")) -> StateVector:
    """``a alpha|01> + b alpha|10> + beta|00> + gamma|11>`` over the two bonding electrons.

    Qubit value 0 (1) puts an electron on X (Y).
    """
    layout = RegisterLayout.qubits(*labels)
    return ket(layout, {
        "01": amps.a * amps.alpha,
        "10": amps.b * amps.alpha,
        "00": amps.beta,
        "11": amps.gamma,
    })


def covalent_qutrit(amps: CovalentAmplitudes, labels=("X", "Y")) -> StateVector:
    """``alpha|11> + beta|20> + gamma|02>`` over the two atomic orbitals."""
    layout = RegisterLayout.qutrits(*labels)
    return ket(layout, {"11": amps.alpha, "20": amps.beta, "02": amps.gamma})


def classical_hbond(alpha_p, beta_p, labels=("X1", "H", "X2")) -> StateVector:
    """Electrostatically polarized X1-H bond next to a lone pair on X2.

    The acceptor orbital stays doubly occupied, so the X2 factor is always
    a product with the rest.
    """
    alpha_p, beta_p = _amp(alpha_p), _amp(beta_p)
    _check_norm("|alpha'|^2 + |beta'|^2", alpha_p, beta_p)
    layout = RegisterLayout.qutrits(*labels)
    return ket(layout, {"112": alpha_p, "202": beta_p})


def covalent_hbond_electron(alpha_m, delta_m, labels=("sigma", "sigma*", "X2")) -> StateVector:
    """Charge transfer from the X2 lone pair into the X1-H antibonding orbital.

    ``|2>_sigma (alpha_m|02> + delta_m|11>)_{sigma*, X2}``, with the ionic
    amplitude of the donor bond set to zero.
    """
    alpha_m, delta_m = _amp(alpha_m), _amp(delta_m)
    _check_norm("|alpha_-|^2 + |delta_-|^2", alpha_m, delta_m)
    layout = RegisterLayout.qutrits(*labels)
    return ket(layout, {"202": alpha_m, "211": delta_m})


def covalent_hbond_proton(alpha_p, delta_p, labels=("X1", "X2")) -> StateVector:
    """Proton shared between donor and acceptor: ``alpha_p|10> + delta_p|01>``."""
    alpha_p, delta_p = _amp(alpha_p), _amp(delta_p)
    _check_norm("|alpha_+|^2 + |delta_+|^2", alpha_p, delta_p)
    return ket(RegisterLayout.qubits(*labels), {"10": alpha_p, "01": delta_p})


def unified_state(amps: HBondAmplitudes, labels=("X1", "X2")) -> StateVector:
    """``c1|10> + c2|01> + c3|00>`` with the donor first in ``labels``."""
    return ket(RegisterLayout.qubits(*labels), {"10": amps.c1, "01": amps.c2, "00": amps.c3})


def polarize(amps: CovalentAmplitudes, beta_new) -> CovalentAmplitudes:
    """Shift weight from the covalent to the donor-anion term.

    Returns amplitudes with ``beta = beta_new``, ``gamma = 0`` and ``alpha``
    rescaled (keeping its phase) to restore normalization.  The ionic
    weight must strictly grow and the covalent weight strictly shrink.
    """
    beta_new = _amp(beta_new)
    if abs(beta_new) <= abs(amps.beta):
        raise QuantumStateError(
            f"|beta_new| = {abs(beta_new):.6g} must exceed |beta| = {abs(amps.beta):.6g}"
        )
    if abs(beta_new) > 1.0 + AMP_TOL:
        raise QuantumStateError("|beta_new| cannot exceed 1")
    mag = math.sqrt(max(0.0, 1.0 - abs(beta_new) ** 2))
    phase = amps.alpha / abs(amps.alpha) if abs(amps.alpha) > 0 else 1.0
    alpha_new = phase * mag
    if abs(alpha_new) ** 2 >= abs(amps.alpha) ** 2:
        raise QuantumStateError("polarization must lower the covalent weight |alpha|^2")
    return CovalentAmplitudes(amps.a, amps.b, alpha_new, beta_new, 0.0)
