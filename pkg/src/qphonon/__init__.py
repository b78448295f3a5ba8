"""qphonon: phonon-scattering VQE, NISQ noise and mitigation, and thermal conductivity."""
from __future__ import annotations

__version__ = "0.1.0"

from .kernels import BACKEND
from .bosonic import FockSpace, LadderOp, LadderProduct
from .pauli import EncodingLayout, PauliSum, PauliTerm
from .hamiltonian import (
    MappedHamiltonian,
    PhononSystem,
    build_h3,
    build_h4,
    exact_ground_energy,
    map_hamiltonian,
    structural_element,
    toy_model,
)
from .circuits import Circuit, Gate, build_ansatz, transpile_cnot_to_ecr
from .engine import DensityMatrix, NoiseModel, StateVector, preset, run_density, run_statevector
from .vqe import Estimator, OptimizerSpec, VqeRun, minimize
from .mitigation import MitigationPlan, ZneSpec, mitigated_energy
from .config import ConfigError, RunConfig

__all__ = [
    "__version__", "BACKEND",
    "FockSpace", "LadderOp", "LadderProduct",
    "EncodingLayout", "PauliSum", "PauliTerm",
    "MappedHamiltonian", "PhononSystem", "build_h3", "build_h4", "exact_ground_energy",
    "map_hamiltonian", "structural_element", "toy_model",
    "Circuit", "Gate", "build_ansatz", "transpile_cnot_to_ecr",
    "DensityMatrix", "NoiseModel", "StateVector", "preset", "run_density", "run_statevector",
    "Estimator", "OptimizerSpec", "VqeRun", "minimize",
    "MitigationPlan", "ZneSpec", "mitigated_energy",
    "ConfigError", "RunConfig",
]
