"""Readout inversion, zero-noise extrapolation, Pauli twirling and their composition."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuits import FIXED_MATRICES, PAULI_MATRICES, Circuit, Gate, bind, transpile_cnot_to_ecr
from .engine import (
    Counts,
    NoiseModel,
    TermMeasurement,
    estimate_from_measurements,
    exact_term_distributions,
    measure_terms,
    parity_signs,
    run_density,
)
from .hamiltonian import MappedHamiltonian
from .pauli import PauliSum

EXTRAPOLATORS = ("linear", "quadratic", "richardson")
STRATEGIES = ("none", "readout", "twirl", "dd", "zne", "all")


# ---------------------------------------------------------------------------
# readout


def _confusions(confusion, width: int) -> list[np.ndarray]:
    if isinstance(confusion, NoiseModel):
        if confusion.readout is None:
            return [np.eye(2)] * width
        return [confusion.readout_matrix(q) for q in range(width)]
    mats = [np.asarray(confusion, dtype=float)] if np.ndim(confusion) == 2 else [np.asarray(m, float) for m in confusion]
    if len(mats) == 1:
        mats = mats * width
    if len(mats) != width:
        raise ValueError(f"need one confusion matrix per qubit ({width}), got {len(mats)}")
    return mats


def _inverse(mat: np.ndarray) -> np.ndarray:
    if abs(np.linalg.det(mat)) < 1e-12:
        raise np.linalg.LinAlgError("confusion matrix is singular")
    return np.linalg.inv(mat)


def _tensor_apply(vec: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    width = len(mats)
    tensor = vec.reshape((2,) * width)
    for q, m in enumerate(mats):
        tensor = np.moveaxis(np.tensordot(m, tensor, axes=([1], [q])), 0, q)
    return tensor.reshape(-1)


def readout_mitigate(counts: Counts | np.ndarray, confusion) -> np.ndarray:
    """Apply the tensor-product inverse confusion to an outcome distribution.

    The result is a quasi-distribution: it sums to one but may hold small
    negative entries, which are kept so expectation values stay unbiased.
    """
    dist = counts.distribution() if isinstance(counts, Counts) else np.asarray(counts, dtype=float)
    width = int(round(np.log2(dist.size)))
    if 1 << width != dist.size:
        raise ValueError("distribution length must be a power of two")
    inverses = [_inverse(m) for m in _confusions(confusion, width)]
    return _tensor_apply(dist, inverses)


def clip_distribution(quasi: np.ndarray) -> np.ndarray:
    """Nearest proper distribution by clipping negatives and renormalizing."""
    clipped = np.clip(quasi, 0.0, None)
    return clipped / clipped.sum()


def readout_weights(confusion):
    """Weight transform ``w -> M^-T w`` so that ``p_hat . w'`` equals ``(M^-1 p_hat) . w``."""

    def transform(weights: np.ndarray, width: int) -> np.ndarray:
        inverses = [_inverse(m).T for m in _confusions(confusion, width)]
        return _tensor_apply(weights, inverses)

    return transform


# ---------------------------------------------------------------------------
# zero-noise extrapolation


@dataclass(frozen=True)
class ZneSpec:
    scale_factors: tuple[int, ...] = (1, 3, 5)
    extrapolator: str = "richardson"

    def __post_init__(self) -> None:
        scales = tuple(int(s) for s in self.scale_factors)
        object.__setattr__(self, "scale_factors", scales)
        if len(set(scales)) < 2:
            raise ValueError("ZNE needs at least two distinct scale factors")
        if any(s < 1 or s % 2 == 0 for s in scales):
            raise ValueError("scale factors must be odd integers >= 1")
        if self.extrapolator not in EXTRAPOLATORS:
            raise ValueError(f"unknown extrapolator {self.extrapolator!r}")
        if self.extrapolator == "quadratic" and len(scales) < 3:
            raise ValueError("quadratic extrapolation needs three scale factors")


def fold_gates(circuit: Circuit, scale: int) -> Circuit:
    """Replace each two-qubit gate G by ``G (G^dag G)^k`` with ``scale = 2k + 1``."""
    if scale < 1 or scale % 2 == 0:
        raise ValueError(f"fold scale must be an odd integer >= 1, got {scale}")
    if not circuit.is_bound:
        raise ValueError("fold_gates needs a bound circuit")
    if scale == 1:
        return circuit
    gates: list[Gate] = []
    for gate in circuit.gates:
        if gate.is_two_qubit:
            # CNOT, CZ and ECR are Hermitian, so G^dag = G
            gates.extend([gate] * scale)
        else:
            gates.append(gate)
    return circuit.with_gates(gates)


def extrapolation_weights(scales: Sequence[float], extrapolator: str) -> np.ndarray:
    """Linear weights ``w`` with ``estimate(0) = w . values``."""
    s = np.asarray(scales, dtype=float)
    if s.size < 2 or len(set(s.tolist())) != s.size:
        raise ValueError("extrapolation needs at least two distinct scales")
    if extrapolator == "richardson":
        weights = np.ones_like(s)
        for i in range(s.size):
            for j in range(s.size):
                if i != j:
                    weights[i] *= s[j] / (s[j] - s[i])
        return weights
    degree = {"linear": 1, "quadratic": 2}.get(extrapolator)
    if degree is None:
        raise ValueError(f"unknown extrapolator {extrapolator!r}")
    if s.size <= degree:
        raise ValueError(f"{extrapolator} fit needs more than {degree} points")
    vander = np.vander(s, degree + 1, increasing=True)
    return np.linalg.pinv(vander)[0]


def zne_extrapolate(points: Sequence[tuple[float, float]], spec: ZneSpec | str = "richardson") -> float:
    extrapolator = spec.extrapolator if isinstance(spec, ZneSpec) else spec
    scales = [s for s, _ in points]
    values = np.array([v for _, v in points], dtype=float)
    return float(extrapolation_weights(scales, extrapolator) @ values)


# ---------------------------------------------------------------------------
# Pauli twirling


@lru_cache(maxsize=None)
def twirl_table(kind: str) -> tuple[tuple[str, str, float], ...]:
    """``(P, Q, phase)`` with ``Q G P = exp(i phase) G`` for every two-qubit Pauli P."""
    if kind not in ("CNOT", "CZ", "ECR"):
        raise ValueError(f"no twirling table for gate kind {kind!r}")
    g = FIXED_MATRICES[kind]
    rows = []
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
    mats = {lab: np.kron(PAULI_MATRICES[lab[0]], PAULI_MATRICES[lab[1]]) for lab in labels}
    for p in labels:
        conj = g @ mats[p] @ g.conj().T
        for q in labels:
            overlap = np.trace(mats[q].conj().T @ conj) / 4
            if abs(abs(overlap) - 1) < 1e-9:
                # G P = s Q G, so Q G P = s G
                rows.append((p, q, float(np.angle(overlap))))
                break
        else:
            raise ValueError(f"{kind} is not Clifford: no Pauli image for {p}")
    return tuple(rows)


def _pauli_gates(label: str, qubits: tuple[int, int]) -> list[Gate]:
    return [Gate(axis, (q,), frame=True) for axis, q in zip(label, qubits) if axis != "I"]


def pauli_twirl(circuit: Circuit, seed: int | np.random.Generator | None = None) -> Circuit:
    """Sandwich every two-qubit gate between random Paulis, keeping the ideal action."""
    if not circuit.is_bound:
        raise ValueError("pauli_twirl needs a bound circuit")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    gates: list[Gate] = []
    phase = 0.0
    for gate in circuit.gates:
        if not gate.is_two_qubit:
            gates.append(gate)
            continue
        table = twirl_table(gate.kind)
        p, q, s = table[rng.integers(len(table))]
        gates.extend(_pauli_gates(p, gate.qubits))
        gates.append(gate)
        gates.extend(_pauli_gates(q, gate.qubits))
        phase -= s
    return circuit.with_gates(gates, phase)


# ---------------------------------------------------------------------------
# composition


@dataclass(frozen=True)
class MitigationPlan:
    readout: bool = False
    zne: bool = False
    twirling: bool = False
    dynamical_decoupling: bool = False
    zne_spec: ZneSpec = field(default_factory=ZneSpec)
    twirl_samples: int = 8
    dd_suppression: float = 1.0

    def __post_init__(self) -> None:
        if self.twirling and self.twirl_samples < 1:
            raise ValueError("twirl_samples must be >= 1 when twirling is enabled")
        if not 0.0 <= self.dd_suppression <= 1.0:
            raise ValueError("dd_suppression must lie in [0, 1]")

    @classmethod
    def strategy(cls, name: str, **kwargs) -> "MitigationPlan":
        flags = {
            "none": {},
            "readout": {"readout": True},
            "twirl": {"twirling": True},
            "dd": {"dynamical_decoupling": True},
            "zne": {"zne": True},
            "all": {"readout": True, "zne": True, "twirling": True, "dynamical_decoupling": True},
        }
        if name not in flags:
            raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
        return cls(**flags[name], **kwargs)


def _estimate(rho, observable: PauliSum, shots: int | None, noise: NoiseModel, correct_readout: bool, seed):
    weight_fn = readout_weights(noise) if correct_readout and noise.readout is not None else None
    if shots is None:
        total = 0.0
        for term, dist in exact_term_distributions(rho, observable, noise):
            if dist is None:
                total += term.coefficient.real
                continue
            w = parity_signs(term.axes)
            if weight_fn is not None:
                w = weight_fn(w, rho.width)
            total += term.coefficient.real * float(dist @ w)
        return total, 0.0
    measurements: list[TermMeasurement] = measure_terms(rho, observable, shots, noise, seed)
    return estimate_from_measurements(measurements, weight_fn)


def mitigated_energy(
    params: Sequence[float] | np.ndarray | None,
    ansatz: Circuit,
    h: MappedHamiltonian | PauliSum,
    noise: NoiseModel,
    plan: MitigationPlan,
    seed: int | None = None,
    shots: int | None = 4096,
    transpile: bool = True,
) -> tuple[float, float]:
    """Energy under ``noise`` with the plan's strategies; returns (mean, standard error).

    ``shots`` is the total budget, split evenly across every executed circuit
    (scale factors times twirl samples); ``None`` uses exact distributions.
    """
    observable = h.pauli if isinstance(h, MappedHamiltonian) else h
    if not observable.is_hermitian():
        raise ValueError("Hamiltonian is not Hermitian")
    circuit = bind(ansatz, params) if params is not None else ansatz
    if transpile:
        circuit = transpile_cnot_to_ecr(circuit)
    scales = plan.zne_spec.scale_factors if plan.zne else (1,)
    n_twirls = plan.twirl_samples if plan.twirling else 1
    per_circuit = None if shots is None else max(shots // (len(scales) * n_twirls), 1)
    dd = plan.dd_suppression if plan.dynamical_decoupling else 0.0

    root = np.random.SeedSequence(seed)
    scale_seeds = root.spawn(len(scales))
    values, errors = [], []
    for scale, scale_seed in zip(scales, scale_seeds):
        folded = fold_gates(circuit, scale)
        twirl_seeds = scale_seed.spawn(n_twirls)
        estimates, variances = [], []
        for tseed in twirl_seeds:
            twirl_rng, shot_seed = tseed.spawn(2)
            run = pauli_twirl(folded, np.random.default_rng(twirl_rng)) if plan.twirling else folded
            rho = run_density(run, noise, dd_suppression=dd)
            value, err = _estimate(rho, observable, per_circuit, noise, plan.readout, shot_seed)
            estimates.append(value)
            variances.append(err**2)
        mean = float(np.mean(estimates))
        # shot noise of the average plus the spread between twirl draws
        var = float(np.sum(variances)) / n_twirls**2
        if n_twirls > 1:
            var += float(np.var(estimates, ddof=1)) / n_twirls
        values.append(mean)
        errors.append(np.sqrt(var))

    if len(scales) == 1:
        return values[0], float(errors[0])
    weights = extrapolation_weights(scales, plan.zne_spec.extrapolator)
    return float(weights @ np.array(values)), float(np.sqrt(np.sum((weights * np.array(errors)) ** 2)))


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    mean: float
    std: float
    relative_error: float


def strategy_report_csv(rows: Sequence[StrategyResult]) -> str:
    lines = ["strategy,mean,std,relative_error"]
    lines.extend(f"{r.strategy},{r.mean:.10g},{r.std:.10g},{r.relative_error:.10g}" for r in rows)
    return "\n".join(lines) + "\n"


__all__ = [
    "EXTRAPOLATORS",
    "STRATEGIES",
    "MitigationPlan",
    "StrategyResult",
    "ZneSpec",
    "clip_distribution",
    "extrapolation_weights",
    "fold_gates",
    "mitigated_energy",
    "pauli_twirl",
    "readout_mitigate",
    "readout_weights",
    "strategy_report_csv",
    "twirl_table",
    "zne_extrapolate",
]
