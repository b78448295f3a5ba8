"""End-to-end experiment drivers shared by the command line and the benchmarks."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .circuits import Circuit, build_ansatz
from .engine import NoiseModel, depolarizing_from_fidelity
from .hamiltonian import (
    MappedHamiltonian,
    PhononSystem,
    build_h3,
    build_h4,
    exact_ground_energy,
    map_hamiltonian,
    structural_element,
)
from .mitigation import STRATEGIES, MitigationPlan, StrategyResult, mitigated_energy
from .pauli import EncodingLayout
from .thermo import (
    Calibration,
    StructuralEstimate,
    ThermalConfig,
    ThermalPoint,
    calibrate,
    element_from_energy,
    sweep,
)
from .vqe import OptimizerSpec, VqeRun, minimize


def mapped_system(
    system: PhononSystem,
    levels_per_phonon: int = 2,
    penalty_weight: float | None = None,
) -> MappedHamiltonian:
    layout = EncodingLayout(system.n_phonons, levels_per_phonon)
    return map_hamiltonian(build_h3(system) + build_h4(system), layout, penalty_weight)


def ground_state_parameters(
    ansatz: Circuit,
    h: MappedHamiltonian,
    seed: int,
    optimizer: OptimizerSpec | None = None,
) -> VqeRun:
    """Noiseless exact-expectation VQE from a seeded start."""
    spec = optimizer or OptimizerSpec("lbfgs-finite-difference", seed=seed)
    if spec.seed != seed:
        spec = replace(spec, seed=seed)
    return minimize(ansatz, h, spec)


def converged_ground_state(
    ansatz: Circuit,
    h: MappedHamiltonian,
    seed: int,
    reference: float,
    tol: float = 1e-6,
    attempts: int = 8,
) -> VqeRun:
    """Noiseless VQE restarted from fresh seeded starts until it reaches ``reference``.

    Local optimizers on the wider ansatz occasionally stall in a local
    minimum; restart seeds are derived from ``seed`` so runs stay reproducible.
    Returns the best run if no attempt gets within ``tol``.
    """
    best = None
    for attempt in range(attempts):
        run = ground_state_parameters(ansatz, h, seed if attempt == 0 else seed + 100_003 * attempt)
        if best is None or run.best_energy < best.best_energy:
            best = run
        if abs(run.best_energy - reference) < tol:
            break
    return best


# ---------------------------------------------------------------------------
# depolarization sweep


@dataclass(frozen=True)
class SweepRow:
    ansatz: str
    fidelity: float
    ratios: tuple[float, ...]

    @property
    def emin(self) -> float:
        return min(self.ratios)

    @property
    def emax(self) -> float:
        return max(self.ratios)

    @property
    def mean(self) -> float:
        return float(np.mean(self.ratios))


def noise_sweep(
    h: MappedHamiltonian,
    ansatz_name: str,
    fidelities: Sequence[float],
    seeds: Sequence[int],
    refine_iterations: int = 40,
    reps: int = 2,
) -> list[SweepRow]:
    """Energy ratio ``E / E_ref`` of VQE runs under two-qubit depolarizing noise.

    Each seed first solves the noiseless problem (restarting if the optimizer
    stalls), then re-optimizes under the noise of every fidelity starting
    from that solution, as a variational loop on a noisy device would.
    """
    for f in fidelities:
        if not 0.9 < f <= 1.0:
            raise ValueError(f"fidelity {f} outside (0.9, 1.0]")
    ansatz = build_ansatz(ansatz_name, h.width, reps)
    reference = exact_ground_energy(h)
    ratios: dict[float, list[float]] = {f: [] for f in fidelities}
    for seed in seeds:
        base = converged_ground_state(ansatz, h, seed, reference)
        for f in fidelities:
            p = depolarizing_from_fidelity(f)
            if p == 0:
                ratios[f].append(base.best_energy / reference)
                continue
            spec = OptimizerSpec("lbfgs-finite-difference", max_iterations=refine_iterations, ftol=1e-9, seed=seed)
            run = minimize(ansatz, h, spec, noise=NoiseModel(depolarizing_p=p), initial=base.best_parameters)
            ratios[f].append(run.best_energy / reference)
    return [SweepRow(ansatz_name, f, tuple(ratios[f])) for f in fidelities]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    """One ansatz per file: ``fidelity,emin,emax,mean`` with ratios in percent."""
    lines = ["fidelity,emin,emax,mean"]
    lines.extend(f"{r.fidelity:.6g},{100 * r.emin:.6f},{100 * r.emax:.6f},{100 * r.mean:.6f}" for r in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# mitigation comparison


@dataclass
class MitigationExperiment:
    reference: float
    values: dict[str, np.ndarray] = field(default_factory=dict)
    stderrs: dict[str, np.ndarray] = field(default_factory=dict)

    def errors(self, strategy: str) -> np.ndarray:
        return np.abs(self.values[strategy] - self.reference)

    def median_error(self, strategy: str) -> float:
        return float(np.median(self.errors(strategy)))

    def variance(self, strategy: str) -> float:
        return float(np.var(self.values[strategy], ddof=1))

    def rows(self) -> list[StrategyResult]:
        out = []
        for s, vals in self.values.items():
            mean = float(np.mean(vals))
            out.append(StrategyResult(s, mean, float(np.std(vals, ddof=1)), abs(mean - self.reference) / abs(self.reference)))
        return out


def mitigation_experiment(
    h: MappedHamiltonian,
    ansatz: Circuit,
    params: np.ndarray,
    noise: NoiseModel,
    trials: int = 50,
    shots: int = 32768,
    seed: int = 0,
    strategies: Sequence[str] = STRATEGIES,
    **plan_options,
) -> MitigationExperiment:
    """Repeat every strategy over seeded trials at a fixed total shot budget."""
    exp = MitigationExperiment(exact_ground_energy(h))
    trial_seeds = np.random.SeedSequence(seed).generate_state(trials)
    for s in strategies:
        plan = MitigationPlan.strategy(s, **plan_options)
        results = [mitigated_energy(params, ansatz, h, noise, plan, int(ts), shots) for ts in trial_seeds]
        exp.values[s] = np.array([v for v, _ in results])
        exp.stderrs[s] = np.array([e for _, e in results])
    return exp


# ---------------------------------------------------------------------------
# thermal conductivity


SOURCE_PLANS = {"vqe-unmitigated": "none", "vqe-mitigated": "all"}


def structural_estimates(
    system: PhononSystem,
    sources: Sequence[str],
    noise: NoiseModel | None = None,
    ansatz_name: str = "custom",
    trials: int = 10,
    shots: int = 32768,
    seed: int = 0,
    levels_per_phonon: int = 2,
) -> tuple[dict[str, StructuralEstimate], float]:
    """Squared splitting element per source; returns the estimates and the exact element.

    VQE sources rescale the exact element by ``(E / E_exact)**2``: in the toy
    model the ground energy is the splitting amplitude itself.
    """
    exact = structural_element(system, levels_per_phonon)
    out: dict[str, StructuralEstimate] = {}
    needs_vqe = any(s != "exact" for s in sources)
    if needs_vqe:
        h = mapped_system(system, levels_per_phonon, penalty_weight=None)
        physical = mapped_system(system, levels_per_phonon, penalty_weight=0.0)
        e_exact = exact_ground_energy(physical)
        ansatz = build_ansatz(ansatz_name, h.width)
        base = ground_state_parameters(ansatz, h, seed)
    for source in sources:
        if source == "exact":
            out[source] = StructuralEstimate(exact, 0.0, source)
        elif source == "vqe-noiseless":
            out[source] = StructuralEstimate(element_from_energy(exact, base.best_energy, e_exact), 0.0, source)
        elif source in SOURCE_PLANS:
            if noise is None:
                raise ValueError(f"source {source!r} needs a noise model")
            plan = MitigationPlan.strategy(SOURCE_PLANS[source])
            trial_seeds = np.random.SeedSequence([seed, len(out)]).generate_state(trials)
            energies = [
                mitigated_energy(base.best_parameters, ansatz, physical, noise, plan, int(ts), shots)[0]
                for ts in trial_seeds
            ]
            elements = [element_from_energy(exact, e, e_exact) for e in energies]
            out[source] = StructuralEstimate(float(np.mean(elements)), float(np.std(elements, ddof=1)) if trials > 1 else 0.0, source)
        else:
            raise ValueError(f"unknown source {source!r}")
    return out, exact


def kappa_pipeline(
    config: ThermalConfig,
    system: PhononSystem,
    estimates: dict[str, StructuralEstimate],
    exact_element: float,
) -> tuple[dict[str, list[ThermalPoint]], Calibration]:
    calibration = calibrate(config, system.frequencies, exact_element)
    return {s: sweep(config, system.frequencies, est, calibration) for s, est in estimates.items()}, calibration
