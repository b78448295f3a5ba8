"""Statevector and density-matrix simulation, noise channels, Pauli estimation."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .circuits import PAULI_MATRICES, TWO_QUBIT, Circuit, Gate, gate_matrix
from .pauli import PauliSum, PauliTerm

NORM_TOL = 1e-10
MAX_DENSITY_WIDTH = 10

# gate durations in ns; RZ and Z are virtual frame changes
DEFAULT_DURATIONS_NS = {"1q": 60.0, "2q": 660.0, "RZ": 0.0, "Z": 0.0}


class SimulationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# states


@dataclass
class StateVector:
    data: np.ndarray
    width: int

    @classmethod
    def zero(cls, width: int) -> "StateVector":
        data = np.zeros(1 << width, dtype=complex)
        data[0] = 1.0
        return cls(data, width)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.data) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def copy(self) -> "StateVector":
        return StateVector(self.data.copy(), self.width)


@dataclass
class DensityMatrix:
    data: np.ndarray
    width: int

    @classmethod
    def zero(cls, width: int) -> "DensityMatrix":
        if width > MAX_DENSITY_WIDTH:
            raise SimulationError(f"density matrices are capped at {MAX_DENSITY_WIDTH} qubits")
        dim = 1 << width
        data = np.zeros((dim, dim), dtype=complex)
        data[0, 0] = 1.0
        return cls(data, width)

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        return cls(np.outer(state.data, state.data.conj()), state.width)

    def probabilities(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.data)), 0.0, None)

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.data.copy(), self.width)


# ---------------------------------------------------------------------------
# noise model


@dataclass(frozen=True)
class NoiseModel:
    """Gate-level noise: two-qubit depolarizing, readout confusion, idle T1/T2.

    ``readout`` holds one 2x2 matrix per qubit with ``M[measured, true]``
    (columns sum to one); a single matrix is broadcast to every qubit.
    ``over_rotation`` adds a coherent rotation (radians) about each two-qubit
    gate's own entangling generator, the usual cross-resonance calibration
    error, and ``single_qubit_p`` depolarizes non-virtual one-qubit gates.
    """

    depolarizing_p: float = 0.0
    readout: tuple[np.ndarray, ...] | None = None
    idle_t1: float | None = None
    idle_t2: float | None = None
    durations: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_DURATIONS_NS))
    single_qubit_p: float = 0.0
    over_rotation: float = 0.0

    def __post_init__(self) -> None:
        for name in ("depolarizing_p", "single_qubit_p"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.readout is not None:
            mats = self.readout
            if isinstance(mats, np.ndarray) and mats.ndim == 2:
                mats = (mats,)
            mats = tuple(np.asarray(m, dtype=float) for m in mats)
            for m in mats:
                if m.shape != (2, 2):
                    raise ValueError("readout confusion matrices must be 2x2")
                if np.any(m < 0) or not np.allclose(m.sum(axis=0), 1.0):
                    raise ValueError("readout confusion columns must be probability vectors")
            object.__setattr__(self, "readout", mats)
        t1, t2 = self.idle_t1, self.idle_t2
        if (t1 is None) != (t2 is None):
            raise ValueError("idle_t1 and idle_t2 must be given together")
        if t1 is not None:
            if t1 <= 0 or t2 <= 0:
                raise ValueError("T1 and T2 must be positive")
            if t2 > 2 * t1 + 1e-12:
                raise ValueError("T2 cannot exceed 2*T1")

    @property
    def has_idle(self) -> bool:
        return self.idle_t1 is not None

    def readout_matrix(self, qubit: int) -> np.ndarray | None:
        if self.readout is None:
            return None
        if len(self.readout) == 1:
            return self.readout[0]
        return self.readout[qubit]

    def without_readout(self) -> "NoiseModel":
        return _replace(self, readout=None)

    def duration(self, gate: Gate) -> float:
        if gate.kind == "GlobalPhase" or gate.frame:
            return 0.0
        if gate.kind in self.durations:
            return float(self.durations[gate.kind])
        return float(self.durations["2q" if gate.is_two_qubit else "1q"])


def _replace(model: NoiseModel, **changes) -> NoiseModel:
    from dataclasses import replace

    return replace(model, **changes)


def confusion_matrix(p0_given_1: float, p1_given_0: float) -> np.ndarray:
    """``M[measured, true]`` for a single qubit."""
    return np.array([[1.0 - p1_given_0, p0_given_1], [p1_given_0, 1.0 - p0_given_1]])


def depolarizing_gate_fidelity(p: float) -> float:
    """Process fidelity of a two-qubit gate followed by depolarizing noise."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return 1.0 - 15.0 * p / 16.0


def depolarizing_from_fidelity(fidelity: float) -> float:
    if not 1.0 / 16.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [1/16, 1], got {fidelity}")
    return (1.0 - fidelity) * 16.0 / 15.0


# device characterization averages used by the ibm_brisbane preset
BRISBANE = {
    "t1_us": 224.67,
    "t2_us": 140.09,
    "frequency_ghz": 4.906,
    "eplg": 0.021,
    "x_error": 0.002457,
    "ecr_error": 0.008471,
    "p0_given_1": 0.0148,
    "p1_given_0": 0.0108,
}


def preset(name: str, **overrides) -> NoiseModel:
    """Named noise models: ``ideal``, ``depolarizing`` and ``ibm_brisbane``."""
    if name == "ideal":
        model = NoiseModel()
    elif name == "ibm_brisbane":
        # the ECR error is read as 1 - process fidelity
        model = NoiseModel(
            depolarizing_p=depolarizing_from_fidelity(1.0 - BRISBANE["ecr_error"]),
            readout=(confusion_matrix(BRISBANE["p0_given_1"], BRISBANE["p1_given_0"]),),
            idle_t1=BRISBANE["t1_us"],
            idle_t2=BRISBANE["t2_us"],
        )
    elif name == "depolarizing":
        model = NoiseModel(depolarizing_p=overrides.pop("depolarizing_p", 0.01))
    else:
        raise ValueError(f"unknown noise preset {name!r}")
    return _replace(model, **overrides) if overrides else model


# ---------------------------------------------------------------------------
# simulation


def _check_bound(circuit: Circuit) -> None:
    if not circuit.is_bound:
        raise SimulationError("circuit has unbound parameters; call bind() first")


def apply_gate(state: StateVector, gate: Gate) -> None:
    if gate.kind == "GlobalPhase":
        state.data *= np.exp(1j * gate.angle)
        return
    mat = gate_matrix(gate)
    if gate.is_two_qubit:
        kernels.apply_2q(state.data, mat, gate.qubits[0], gate.qubits[1], state.width)
    else:
        kernels.apply_1q(state.data, np.ascontiguousarray(mat), gate.qubits[0], state.width)


def run_statevector(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    _check_bound(circuit)
    state = StateVector.zero(circuit.width) if initial is None else initial.copy()
    for gate in circuit.gates:
        apply_gate(state, gate)
    if circuit.global_phase:
        state.data *= np.exp(1j * circuit.global_phase)
    return state


def _apply_unitary_dm(rho: DensityMatrix, mat: np.ndarray, qubits: tuple[int, ...]) -> None:
    n = rho.width
    flat = rho.data.reshape(-1)
    conj = np.ascontiguousarray(mat.conj())
    mat = np.ascontiguousarray(mat)
    if len(qubits) == 1:
        kernels.apply_1q(flat, mat, qubits[0], 2 * n)
        kernels.apply_1q(flat, conj, n + qubits[0], 2 * n)
    else:
        kernels.apply_2q(flat, mat, qubits[0], qubits[1], 2 * n)
        kernels.apply_2q(flat, conj, n + qubits[0], n + qubits[1], 2 * n)


def _apply_superop_1q(rho: DensityMatrix, superop: np.ndarray, qubit: int) -> None:
    n = rho.width
    kernels.apply_2q(rho.data.reshape(-1), superop, qubit, n + qubit, 2 * n)


def idle_superoperator(duration_ns: float, t1_us: float, t2_us: float) -> np.ndarray:
    """Amplitude damping plus dephasing over an idle window, on ``|row col>``."""
    t = duration_ns * 1e-3
    gamma = 1.0 - np.exp(-t / t1_us)
    coherence = np.exp(-t / t2_us)
    s = np.zeros((4, 4), dtype=complex)
    s[0, 0] = 1.0
    s[0, 3] = gamma
    s[3, 3] = 1.0 - gamma
    s[1, 1] = coherence
    s[2, 2] = coherence
    return s


def single_qubit_depolarizing_superop(p: float) -> np.ndarray:
    s = np.zeros((4, 4), dtype=complex)
    s[0, 0] = s[3, 3] = 1.0 - p / 2
    s[0, 3] = s[3, 0] = p / 2
    s[1, 1] = s[2, 2] = 1.0 - p
    return s


# entangling generator of each two-qubit gate in |q0 q1> order
GENERATORS = {"CNOT": "ZX", "CZ": "ZZ", "ECR": "XZ"}


@lru_cache(maxsize=64)
def over_rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """``exp(-i angle/2 G)`` for the gate's generator ``G``."""
    a, b = GENERATORS[kind]
    gen = np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b])
    mat = np.cos(angle / 2) * np.eye(4) - 1j * np.sin(angle / 2) * gen
    mat.setflags(write=False)
    return mat


def run_density(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    dd_suppression: float = 0.0,
) -> DensityMatrix:
    """Noisy density-matrix evolution from ``|0...0>``.

    Each qubit keeps a clock; when a gate has to wait for a busy partner the
    waiting qubit decoheres for the gap, and every qubit idles until the
    final measurement time.  ``dd_suppression`` in [0, 1] removes that
    fraction of the idle window (dynamical decoupling).
    """
    _check_bound(circuit)
    noise = noise or NoiseModel()
    if not 0.0 <= dd_suppression <= 1.0:
        raise ValueError("dd_suppression must lie in [0, 1]")
    n = circuit.width
    rho = DensityMatrix.zero(n)
    clock = np.zeros(n)
    touched = np.zeros(n, dtype=bool)
    idle_scale = 1.0 - dd_suppression
    idle_cache: dict[float, np.ndarray] = {}

    def idle(q: int, gap: float) -> None:
        if not noise.has_idle or gap <= 0 or not touched[q] or idle_scale == 0:
            return
        key = round(gap * idle_scale, 9)
        sop = idle_cache.get(key)
        if sop is None:
            sop = idle_cache[key] = idle_superoperator(key, noise.idle_t1, noise.idle_t2)
        _apply_superop_1q(rho, sop, q)

    sq_superop = single_qubit_depolarizing_superop(noise.single_qubit_p) if noise.single_qubit_p else None

    for gate in circuit.gates:
        if gate.kind == "GlobalPhase":
            continue
        qubits = gate.qubits
        start = max(clock[q] for q in qubits)
        for q in qubits:
            idle(q, start - clock[q])
        _apply_unitary_dm(rho, gate_matrix(gate), qubits)
        if gate.kind in TWO_QUBIT:
            if noise.over_rotation:
                _apply_unitary_dm(rho, over_rotation_matrix(gate.kind, noise.over_rotation), qubits)
            if noise.depolarizing_p:
                kernels.depolarize_pair(rho.data, qubits[0], qubits[1], n, noise.depolarizing_p)
        elif sq_superop is not None and noise.duration(gate) > 0:
            _apply_superop_1q(rho, sq_superop, qubits[0])
        end = start + noise.duration(gate)
        for q in qubits:
            clock[q] = end
            touched[q] = True
    final = clock.max()
    for q in range(n):
        idle(q, final - clock[q])
    return rho


# ---------------------------------------------------------------------------
# expectation values


def _check_observable(observable: PauliSum, width: int) -> PauliSum:
    if observable.width != width:
        raise SimulationError(f"observable width {observable.width} != state width {width}")
    simplified = observable.simplify()
    if not simplified.is_hermitian():
        raise SimulationError("observable is not Hermitian; its expectation would be complex")
    return simplified


def term_expectation(state: StateVector | DensityMatrix, term: PauliTerm) -> complex:
    xmask, zmask, ny = term.masks
    if isinstance(state, StateVector):
        return kernels.pauli_expval_sv(state.data, xmask, zmask, ny)
    return kernels.pauli_expval_dm(state.data, xmask, zmask, ny)


def expectation(state: StateVector | DensityMatrix, observable: PauliSum) -> float:
    observable = _check_observable(observable, state.width)
    total = 0.0
    for term in observable.terms:
        total += (term.coefficient * term_expectation(state, term)).real
    return float(total)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class Counts:
    counts: dict[str, int]
    shots: int
    width: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to shots")

    @classmethod
    def from_array(cls, hist: np.ndarray, width: int) -> "Counts":
        counts = {format(i, f"0{width}b"): int(c) for i, c in enumerate(hist) if c}
        return cls(counts, int(hist.sum()), width)

    def to_array(self) -> np.ndarray:
        out = np.zeros(1 << self.width, dtype=np.int64)
        for key, c in self.counts.items():
            out[int(key, 2)] = c
        return out

    def distribution(self) -> np.ndarray:
        return self.to_array() / self.shots


def apply_readout(probabilities: np.ndarray, noise: NoiseModel | None, width: int) -> np.ndarray:
    """Push exact outcome probabilities through the per-qubit confusion model."""
    if noise is None or noise.readout is None:
        return probabilities
    tensor = probabilities.reshape((2,) * width)
    for q in range(width):
        tensor = np.moveaxis(np.tensordot(noise.readout_matrix(q), tensor, axes=([1], [q])), 0, q)
    return tensor.reshape(-1)


def sample(
    state: StateVector | DensityMatrix,
    basis_circuit: Circuit | None,
    shots: int,
    noise: NoiseModel | None = None,
    seed: int | np.random.Generator | None = None,
) -> Counts:
    """Born-rule sampling after an optional basis-change circuit.

    Readout flips are independent per qubit, so sampling from the confused
    outcome distribution is equivalent to flipping each measured bit.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if basis_circuit is not None and basis_circuit.gates:
        state = _rotate(state, basis_circuit)
    probs = apply_readout(state.probabilities(), noise, state.width)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    hist = rng.multinomial(shots, probs)
    return Counts.from_array(hist, state.width)


def _rotate(state: StateVector | DensityMatrix, circuit: Circuit) -> StateVector | DensityMatrix:
    state = state.copy()
    for gate in circuit.gates:
        if isinstance(state, StateVector):
            apply_gate(state, gate)
        else:
            _apply_unitary_dm(state, gate_matrix(gate), gate.qubits)
    return state


def basis_rotation(axes: str) -> Circuit:
    """One-qubit rotations mapping each X/Y axis of ``axes`` onto Z."""
    gates = []
    for q, ch in enumerate(axes):
        if ch == "X":
            gates.append(Gate("RY", (q,), angle=-np.pi / 2))
        elif ch == "Y":
            gates.append(Gate("RX", (q,), angle=np.pi / 2))
    return Circuit(len(axes), tuple(gates))


def parity_signs(axes: str) -> np.ndarray:
    """``+-1`` eigenvalue of the rotated Z-string for each outcome index."""
    n = len(axes)
    idx = np.arange(1 << n)
    signs = np.ones(1 << n)
    for q, ch in enumerate(axes):
        if ch != "I":
            signs *= 1 - 2 * ((idx >> (n - 1 - q)) & 1)
    return signs


def allocate_shots(observable: PauliSum, shots: int, minimum: int = 64) -> list[int]:
    """Shots per non-identity term, proportional to ``|coefficient|``."""
    weights = np.array([0.0 if t.is_identity() else abs(t.coefficient) for t in observable.terms])
    if weights.sum() == 0:
        return [0] * len(weights)
    raw = shots * weights / weights.sum()
    return [0 if w == 0 else max(minimum, int(round(r))) for w, r in zip(weights, raw)]


@dataclass
class TermMeasurement:
    term: PauliTerm
    counts: Counts | None


def measure_terms(
    state: StateVector | DensityMatrix,
    observable: PauliSum,
    shots: int,
    noise: NoiseModel | None = None,
    seed: int | np.random.SeedSequence | None = None,
) -> list[TermMeasurement]:
    observable = _check_observable(observable, state.width)
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = seq.spawn(len(observable.terms))
    out = []
    for term, n_shots, child in zip(observable.terms, allocate_shots(observable, shots), children):
        if term.is_identity():
            out.append(TermMeasurement(term, None))
            continue
        counts = sample(state, basis_rotation(term.axes), n_shots, noise, np.random.default_rng(child))
        out.append(TermMeasurement(term, counts))
    return out


def estimate_from_measurements(
    measurements: Sequence[TermMeasurement],
    weight_fn=None,
) -> tuple[float, float]:
    """Energy estimate and standard error from per-term counts.

    Each term is estimated as ``p_hat . w`` with ``w`` the parity signs, or
    ``weight_fn(signs, width)`` when a linear correction such as readout
    inversion is folded into the weights.  The standard error follows from
    the multinomial covariance of ``p_hat``.
    """
    value = 0.0
    variance = 0.0
    for m in measurements:
        coeff = m.term.coefficient.real
        if m.counts is None:
            value += coeff
            continue
        dist = m.counts.distribution()
        weights = parity_signs(m.term.axes)
        if weight_fn is not None:
            weights = weight_fn(weights, m.counts.width)
        mean = float(dist @ weights)
        second = float(dist @ weights**2)
        value += coeff * mean
        variance += coeff**2 * max(second - mean**2, 0.0) / m.counts.shots
    return value, float(np.sqrt(variance))


def estimate_expectation(
    state: StateVector | DensityMatrix,
    observable: PauliSum,
    shots: int,
    noise: NoiseModel | None = None,
    seed: int | None = None,
) -> tuple[float, float]:
    return estimate_from_measurements(measure_terms(state, observable, shots, noise, seed))


def exact_term_distributions(
    state: StateVector | DensityMatrix,
    observable: PauliSum,
    noise: NoiseModel | None = None,
) -> list[tuple[PauliTerm, np.ndarray | None]]:
    """Infinite-shot outcome distribution of every term's measurement basis."""
    observable = _check_observable(observable, state.width)
    out = []
    for term in observable.terms:
        if term.is_identity():
            out.append((term, None))
            continue
        rotated = _rotate(state, basis_rotation(term.axes))
        out.append((term, apply_readout(rotated.probabilities(), noise, state.width)))
    return out


def measured_expectation(
    state: StateVector | DensityMatrix,
    observable: PauliSum,
    noise: NoiseModel | None = None,
) -> float:
    """Expectation seen through the readout channel, without shot noise."""
    if noise is None or noise.readout is None:
        return expectation(state, observable)
    total = 0.0
    for term, dist in exact_term_distributions(state, observable, noise):
        sign_sum = 1.0 if dist is None else float(dist @ parity_signs(term.axes))
        total += term.coefficient.real * sign_sum
    return total
