import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hbondq.qmath import RegisterLayout, StateVector

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def random_state(rng, layout: RegisterLayout) -> StateVector:
    z = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return StateVector(layout, z / np.linalg.norm(z))


def random_span_state(rng, labels=("X2", "X1")) -> StateVector:
    """Random two-qubit state with no |11> component."""
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    z /= np.linalg.norm(z)
    amps = np.zeros(4, dtype=complex)
    amps[[2, 1, 0]] = z  # |10>, |01>, |00>
    return StateVector(RegisterLayout.qubits(*labels), amps)


def random_unitary(rng, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def wootters_reference(rho: np.ndarray) -> float:
    """Concurrence from the non-Hermitian product rho * rho~."""
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    flipped = yy @ rho.conj() @ yy
    ev = np.linalg.eigvals(rho @ flipped)
    lam = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def h2(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def eof_reference(rho: np.ndarray) -> float:
    c = wootters_reference(rho)
    return h2((1 + np.sqrt(max(0.0, 1 - c * c))) / 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


SUITE_BUDGET_S = 60.0


def pytest_sessionstart(session):
    import time

    session.config._hbondq_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import time

    elapsed = time.perf_counter() - config._hbondq_t0
    status = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(f"{status} criterion 9 (runtime): full suite took {elapsed:.1f} s, budget {SUITE_BUDGET_S:.0f} s")
