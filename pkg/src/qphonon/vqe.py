"""Variational energy minimization over ansatz parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .circuits import Circuit, bind, initial_parameters
from .engine import (
    NoiseModel,
    estimate_expectation,
    expectation,
    measured_expectation,
    run_density,
    run_statevector,
)
from .hamiltonian import MappedHamiltonian
from .pauli import PauliSum

OPTIMIZERS = ("nelder-mead", "powell", "spsa", "lbfgs-finite-difference", "cobyla-style")
_ALIASES = {
    "nelder_mead": "nelder-mead",
    "neldermead": "nelder-mead",
    "lbfgs": "lbfgs-finite-difference",
    "l-bfgs-b": "lbfgs-finite-difference",
    "lbfgsb": "lbfgs-finite-difference",
    "cobyla": "cobyla-style",
}
PATIENCE = 10
PARAMETER_BOUND = 2 * math.pi
DEFAULT_SHOTS = 4096


class VqeFailure(RuntimeError):
    """The objective produced a non-finite energy."""


def canonical_optimizer(kind: str) -> str:
    kind = kind.strip().lower()
    kind = _ALIASES.get(kind, kind)
    if kind not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {kind!r}; expected one of {OPTIMIZERS}")
    return kind


@dataclass(frozen=True)
class OptimizerSpec:
    kind: str = "lbfgs-finite-difference"
    max_iterations: int = 2000
    ftol: float = 1e-12
    xtol: float = 1e-10
    seed: int | None = 0
    fd_step: float = 1e-6
    # SPSA gain schedule (Spall's standard exponents)
    spsa_a: float | None = None
    spsa_c: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", canonical_optimizer(self.kind))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.ftol <= 0 or self.xtol <= 0 or self.fd_step <= 0 or self.spsa_c <= 0:
            raise ValueError("tolerances and steps must be positive")


@dataclass(frozen=True)
class Estimator:
    """``shots=None`` means exact expectation values."""

    shots: int | None = None

    def __post_init__(self) -> None:
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")

    @property
    def label(self) -> str:
        return "exact" if self.shots is None else f"shots({self.shots})"


EXACT = Estimator()


def _as_estimator(mode: Estimator | str | int | None) -> Estimator:
    if mode is None or mode == "exact":
        return EXACT
    if isinstance(mode, Estimator):
        return mode
    if isinstance(mode, int):
        return Estimator(mode)
    if isinstance(mode, str) and mode.startswith("shots"):
        digits = mode[5:].strip("()= ")
        return Estimator(int(digits) if digits else DEFAULT_SHOTS)
    raise ValueError(f"unknown estimator mode {mode!r}")


def _observable(h: MappedHamiltonian | PauliSum) -> PauliSum:
    return h.pauli if isinstance(h, MappedHamiltonian) else h


def prepare(circuit: Circuit, noise: NoiseModel | None):
    """Statevector when the gates are noiseless, density matrix otherwise."""
    gate_noise = noise is not None and (
        noise.depolarizing_p or noise.has_idle or noise.over_rotation or noise.single_qubit_p
    )
    return run_density(circuit, noise) if gate_noise else run_statevector(circuit)


def energy(
    params: Sequence[float] | np.ndarray,
    ansatz: Circuit,
    h: MappedHamiltonian | PauliSum,
    mode: Estimator | str | int | None = None,
    noise: NoiseModel | None = None,
    seed: int | None = None,
) -> float:
    observable = _observable(h)
    if not observable.is_hermitian():
        raise ValueError("Hamiltonian is not Hermitian")
    estimator = _as_estimator(mode)
    state = prepare(bind(ansatz, params), noise)
    if estimator.shots is None:
        if noise is not None and noise.readout is not None:
            return measured_expectation(state, observable, noise)
        return expectation(state, observable)
    value, _ = estimate_expectation(state, observable, estimator.shots, noise, seed)
    return value


@dataclass(frozen=True)
class VqeRun:
    best_parameters: np.ndarray
    best_energy: float
    history: tuple[tuple[int, float], ...]
    mode: str
    converged: bool
    optimizer: str
    iterations: int
    message: str = ""

    @property
    def n_evaluations(self) -> int:
        return len(self.history)

    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.history])


def patience_converged(energies: Sequence[float], ftol: float, patience: int = PATIENCE) -> bool:
    """Best-so-far energy improved by less than ``ftol`` over the last ``patience`` entries."""
    values = np.asarray(energies, dtype=float)
    if values.size <= patience:
        return False
    best = np.minimum.accumulate(values)
    return bool(best[-patience - 1] - best[-1] < ftol)


def central_difference_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, step: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        grad[i] = (f(x + e) - f(x - e)) / (2 * step)
    return grad


def _spsa(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    spec: OptimizerSpec,
    callback: Callable[[np.ndarray], None],
) -> tuple[np.ndarray, str]:
    rng = np.random.default_rng(spec.seed)
    alpha, gamma = 0.602, 0.101
    big_a = 0.1 * spec.max_iterations
    c = spec.spsa_c
    x = np.array(x0, dtype=float)
    a = spec.spsa_a
    if a is None:
        # pick a so the first update moves each parameter by about 0.2
        samples = []
        for _ in range(5):
            delta = rng.choice((-1.0, 1.0), size=x.size)
            samples.append(abs(f(x + c * delta) - f(x - c * delta)) / (2 * c))
        magnitude = float(np.mean(samples)) or 1.0
        a = 0.2 * (big_a + 1) ** alpha / magnitude
    for k in range(spec.max_iterations):
        ak = a / (k + 1 + big_a) ** alpha
        ck = c / (k + 1) ** gamma
        delta = rng.choice((-1.0, 1.0), size=x.size)
        diff = f(x + ck * delta) - f(x - ck * delta)
        x = x - ak * diff / (2 * ck) * delta
        callback(x)
    return x, "iteration budget exhausted"


def minimize(
    ansatz: Circuit,
    h: MappedHamiltonian | PauliSum,
    optimizer: OptimizerSpec | None = None,
    mode: Estimator | str | int | None = None,
    noise: NoiseModel | None = None,
    initial: Sequence[float] | np.ndarray | None = None,
) -> VqeRun:
    """Run one optimizer from ``initial`` (or a seeded uniform draw) and keep every evaluation."""
    spec = optimizer or OptimizerSpec()
    estimator = _as_estimator(mode)
    observable = _observable(h)
    if not observable.is_hermitian():
        raise ValueError("Hamiltonian is not Hermitian")
    if initial is None:
        x0 = initial_parameters(ansatz.n_parameters, spec.seed)
    else:
        x0 = np.asarray(initial, dtype=float).copy()
        if x0.shape != (ansatz.n_parameters,):
            raise ValueError(f"initial point needs {ansatz.n_parameters} entries, got {x0.shape}")

    history: list[tuple[int, float]] = []
    best = {"energy": math.inf, "x": x0.copy()}
    shot_seeds = np.random.SeedSequence(spec.seed)
    iterations = [0]

    def objective(x: np.ndarray) -> float:
        seed = None
        if estimator.shots is not None:
            seed = int(shot_seeds.spawn(1)[0].generate_state(1)[0])
        value = energy(x, ansatz, observable, estimator, noise, seed)
        if not math.isfinite(value):
            raise VqeFailure(f"non-finite energy {value} at evaluation {len(history) + 1}")
        history.append((len(history) + 1, value))
        if value < best["energy"]:
            best["energy"] = value
            best["x"] = np.array(x, dtype=float)
        return value

    def callback(*_args) -> None:
        iterations[0] += 1

    kind = spec.kind
    message = ""
    if kind == "nelder-mead":
        res = optimize.minimize(
            objective, x0, method="Nelder-Mead", callback=callback,
            options={"maxfev": spec.max_iterations * 10, "maxiter": spec.max_iterations,
                     "xatol": spec.xtol, "fatol": spec.ftol, "adaptive": True},
        )
        message = str(res.message)
    elif kind == "powell":
        res = optimize.minimize(
            objective, x0, method="Powell", callback=callback,
            options={"maxiter": spec.max_iterations, "xtol": spec.xtol, "ftol": spec.ftol},
        )
        message = str(res.message)
    elif kind == "cobyla-style":
        res = optimize.minimize(
            objective, x0, method="COBYLA", callback=callback,
            options={"maxiter": spec.max_iterations * 10, "rhobeg": 0.5, "tol": spec.xtol},
        )
        message = str(res.message)
    elif kind == "lbfgs-finite-difference":
        bounds = [(-PARAMETER_BOUND, PARAMETER_BOUND)] * ansatz.n_parameters
        res = optimize.minimize(
            objective, np.clip(x0, -PARAMETER_BOUND, PARAMETER_BOUND), method="L-BFGS-B",
            jac=lambda x: central_difference_gradient(objective, x, spec.fd_step),
            bounds=bounds, callback=callback,
            options={"maxiter": spec.max_iterations, "ftol": spec.ftol, "gtol": 1e-9},
        )
        message = str(res.message)
    else:
        x_final, message = _spsa(objective, x0, spec, callback)
        objective(x_final)

    energies = [e for _, e in history]
    converged = patience_converged(energies, spec.ftol) or message.lower().startswith(
        ("optimization terminated", "convergence", "optimization terminated successfully")
    )
    return VqeRun(
        best_parameters=best["x"],
        best_energy=float(best["energy"]),
        history=tuple(history),
        mode=estimator.label,
        converged=bool(converged),
        optimizer=kind,
        iterations=iterations[0],
        message=message,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    evaluations_to_tolerance: dict[float, int | None]
    final_gap: float
    envelope: tuple[float, ...] = field(repr=False)


def convergence_report(
    run: VqeRun,
    reference: float | None = None,
    thresholds: Sequence[float] = (1e-3, 1e-6),
) -> ConvergenceReport:
    """Evaluations needed to reach each gap threshold, final gap and best-so-far envelope."""
    if not run.history:
        raise ValueError("run has an empty history")
    energies = run.energies()
    envelope = np.minimum.accumulate(energies)
    ref = run.best_energy if reference is None else reference
    reached: dict[float, int | None] = {}
    for tol in thresholds:
        hits = np.nonzero(np.abs(envelope - ref) < tol)[0]
        reached[tol] = int(hits[0]) + 1 if hits.size else None
    return ConvergenceReport(reached, float(abs(envelope[-1] - ref)), tuple(float(e) for e in envelope))


def history_csv(run: VqeRun) -> str:
    lines = ["evaluation,energy"]
    lines.extend(f"{i},{e:.15g}" for i, e in run.history)
    return "\n".join(lines) + "\n"
