"""Parameterized circuits, ansatz builders and CNOT->ECR transpilation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

ROTATIONS = frozenset({"RX", "RY", "RZ"})
FIXED_1Q = frozenset({"X", "Y", "Z", "SX"})
TWO_QUBIT = frozenset({"CNOT", "CZ", "ECR"})
KINDS = ROTATIONS | FIXED_1Q | TWO_QUBIT | {"GlobalPhase"}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...] = ()
    angle: float | None = None
    index: int | None = None
    # Pauli-frame gates from twirling are absorbed into neighbouring pulses
    frame: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        n_expected = 0 if self.kind == "GlobalPhase" else 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != n_expected:
            raise ValueError(f"{self.kind} acts on {n_expected} qubit(s), got {self.qubits}")
        if self.kind in TWO_QUBIT and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits")
        if self.kind in ROTATIONS or self.kind == "GlobalPhase":
            if (self.angle is None) == (self.index is None):
                raise ValueError(f"{self.kind} needs exactly one of angle or parameter index")
        elif self.angle is not None or self.index is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    @property
    def bound(self) -> bool:
        return self.index is None


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    n_parameters: int = 0
    global_phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 1:
            raise ValueError("circuit width must be >= 1")
        for gate in self.gates:
            if any(not 0 <= q < self.width for q in gate.qubits):
                raise ValueError(f"gate {gate} addresses a qubit outside width {self.width}")
            if gate.index is not None and not 0 <= gate.index < self.n_parameters:
                raise ValueError(f"parameter index {gate.index} >= n_parameters {self.n_parameters}")

    @property
    def is_bound(self) -> bool:
        return all(g.bound for g in self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def with_gates(self, gates: Iterable[Gate], phase_shift: float = 0.0) -> "Circuit":
        return replace(self, gates=tuple(gates), global_phase=self.global_phase + phase_shift)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("cannot concatenate circuits of different width")
        if not other.is_bound:
            raise ValueError("only bound circuits can be appended")
        return replace(self, gates=self.gates + other.gates, global_phase=self.global_phase + other.global_phase)

    # text format: one "KIND q0 [q1] [p<index>|angle]" per line
    def dumps(self) -> str:
        lines = [f"# width={self.width} parameters={self.n_parameters} global_phase={self.global_phase!r}"]
        for g in self.gates:
            fields = [g.kind, *map(str, g.qubits)]
            if g.index is not None:
                fields.append(f"p{g.index}")
            elif g.angle is not None:
                fields.append(repr(g.angle))
            lines.append(" ".join(fields))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Circuit":
        header = {}
        gates = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split():
                    key, _, value = item.partition("=")
                    header[key] = value
                continue
            kind, *rest = line.split()
            n_q = 0 if kind == "GlobalPhase" else 2 if kind in TWO_QUBIT else 1
            qubits = tuple(int(x) for x in rest[:n_q])
            param = rest[n_q:]
            angle = index = None
            if param:
                if param[0].startswith("p"):
                    index = int(param[0][1:])
                else:
                    angle = float(param[0])
            gates.append(Gate(kind, qubits, angle, index))
        width = int(header.get("width", 1 + max((q for g in gates for q in g.qubits), default=0)))
        n_params = int(header.get("parameters", 1 + max((g.index for g in gates if g.index is not None), default=-1)))
        return cls(width, tuple(gates), n_params, float(header.get("global_phase", 0.0)))


# ---------------------------------------------------------------------------
# gate matrices (two-qubit matrices in big-endian |q0 q1> order)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)

FIXED_MATRICES: dict[str, np.ndarray] = {
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "ECR": (np.kron(_I2, _X) - np.kron(_X, _Y)) / np.sqrt(2),
}
PAULI_MATRICES = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}


@lru_cache(maxsize=4096)
def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "RX":
        mat = np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    elif kind == "RY":
        mat = np.array([[c, -s], [s, c]], dtype=complex)
    elif kind == "RZ":
        mat = np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    else:
        raise ValueError(f"{kind} is not a rotation")
    mat.setflags(write=False)
    return mat


def gate_matrix(gate: Gate) -> np.ndarray:
    if gate.kind in ROTATIONS:
        if gate.angle is None:
            raise ValueError(f"gate {gate} has an unbound parameter")
        return rotation_matrix(gate.kind, float(gate.angle))
    if gate.kind == "GlobalPhase":
        raise ValueError("GlobalPhase has no matrix; it scales the whole state")
    return FIXED_MATRICES[gate.kind]


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary including the global phase (small widths only)."""
    if not circuit.is_bound:
        raise ValueError("circuit has unbound parameters")
    n = circuit.width
    if n > 10:
        raise ValueError("dense unitary limited to 10 qubits")
    dim = 1 << n
    U = np.eye(dim, dtype=complex)
    phase = circuit.global_phase
    for gate in circuit.gates:
        if gate.kind == "GlobalPhase":
            phase += gate.angle
            continue
        U = _embed(gate_matrix(gate), gate.qubits, n) @ U
    return np.exp(1j * phase) * U


def _embed(mat: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(mat, np.eye(1 << (n - k)))
    order = list(qubits) + rest
    perm = np.argsort(order)
    tensor = full.reshape((2,) * (2 * n))
    tensor = tensor.transpose(list(perm) + [n + p for p in perm])
    return tensor.reshape(1 << n, 1 << n)


# ---------------------------------------------------------------------------
# ansatz builders


def build_efficient_su2(width: int, reps: int = 2) -> Circuit:
    """RY+RZ rotation layers separated by fully pairwise CNOT blocks."""
    if width < 2:
        raise ValueError("EfficientSU2-style ansatz needs width >= 2")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gates: list[Gate] = []
    p = 0
    for layer in range(reps + 1):
        for kind in ("RY", "RZ"):
            for q in range(width):
                gates.append(Gate(kind, (q,), index=p))
                p += 1
        if layer < reps:
            gates.extend(Gate("CNOT", (i, j)) for i, j in combinations(range(width), 2))
    return Circuit(width, tuple(gates), p)


def build_custom_ansatz(width: int = 6, layers: int = 4) -> Circuit:
    """Real-amplitude ansatz: RY layers, each followed by a CNOT chain; closing CZ."""
    if width < 2:
        raise ValueError("custom ansatz needs width >= 2")
    gates: list[Gate] = []
    p = 0
    for _ in range(layers):
        for q in range(width):
            gates.append(Gate("RY", (q,), index=p))
            p += 1
        gates.extend(Gate("CNOT", (q, q + 1)) for q in range(width - 1))
    gates.append(Gate("CZ", (width - 1, 0)))
    return Circuit(width, tuple(gates), p)


def build_ansatz(name: str, width: int, reps: int = 2) -> Circuit:
    if name in ("su2", "efficient_su2"):
        return build_efficient_su2(width, reps)
    if name in ("custom", "custom_ansatz"):
        return build_custom_ansatz(width)
    raise ValueError(f"unknown ansatz {name!r}; expected 'su2' or 'custom'")


def bind(circuit: Circuit, values: Sequence[float] | np.ndarray) -> Circuit:
    values = np.asarray(values, dtype=float).ravel()
    if values.shape[0] != circuit.n_parameters:
        raise ValueError(f"expected {circuit.n_parameters} parameter values, got {values.shape[0]}")
    gates = tuple(
        Gate(g.kind, g.qubits, angle=float(values[g.index])) if g.index is not None else g
        for g in circuit.gates
    )
    return replace(circuit, gates=gates)


def initial_parameters(n: int, seed: int | None = None, spread: float | None = None) -> np.ndarray:
    """Uniform draw in [-pi, pi], or a small perturbation around zero when ``spread`` is set."""
    rng = np.random.default_rng(seed)
    if spread is not None:
        return rng.normal(0.0, spread, size=n)
    return rng.uniform(-np.pi, np.pi, size=n)


# ---------------------------------------------------------------------------
# transpilation

ECR_CONVERSION_PHASE = np.pi / 2


def cnot_as_ecr(control: int, target: int) -> list[Gate]:
    """Gate list equal to ``exp(-i pi/2) * CNOT(control, target)``.

    Adding ``ECR_CONVERSION_PHASE`` to the circuit's global phase restores the
    exact CNOT.
    """
    return [
        Gate("X", (control,)),
        Gate("RZ", (target,), angle=np.pi),
        Gate("ECR", (target, control)),
        Gate("RZ", (control,), angle=-np.pi / 2),
        Gate("SX", (target,)),
        Gate("RZ", (target,), angle=np.pi),
    ]


def transpile_cnot_to_ecr(circuit: Circuit) -> Circuit:
    gates: list[Gate] = []
    phase = 0.0
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            gates.extend(cnot_as_ecr(*gate.qubits))
            phase += ECR_CONVERSION_PHASE
        else:
            gates.append(gate)
    return circuit.with_gates(gates, phase)
