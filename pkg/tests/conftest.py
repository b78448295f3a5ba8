from __future__ import annotations

import numpy as np
import pytest

from qphonon import _pykernels, kernels
from qphonon.experiments import mapped_system
from qphonon.hamiltonian import toy_model

try:
    from qphonon import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="numpy")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))

_KERNEL_NAMES = ("apply_1q", "apply_2q", "depolarize_pair", "pauli_expval_sv", "pauli_expval_dm")


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every engine kernel call through one implementation."""
    module = request.param
    for name in _KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(module, name))
    return module


@pytest.fixture(scope="session")
def toy_h():
    """Penalty-augmented toy Hamiltonian (6 qubits)."""
    return mapped_system(toy_model())


@pytest.fixture(scope="session")
def toy_physical():
    return mapped_system(toy_model(), penalty_weight=0.0)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
