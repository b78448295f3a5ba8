"""Anharmonic phonon Hamiltonian: ladder-form terms, qubit mapping, oracles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .bosonic import (
    FockSpace,
    Kind,
    LadderOp,
    LadderProduct,
    embed,
    wick_expectation,
)
from .pauli import (
    EncodingLayout,
    PauliSum,
    encode_product,
    occupancy_projector,
    restrict_to_one_hot,
    to_matrix,
)

CONSERVATION_TOL = 1e-9


def energy_conserving(frequencies: Sequence[float], modes: Sequence[int]) -> bool:
    """True when the mode energies split into two sides with equal sums.

    Covers one phonon splitting into (or combining from) the others for
    triples, and every 1->3 / 2->2 channel for quadruples.
    """
    omegas = [frequencies[m] for m in modes]
    total = sum(omegas)
    for r in range(1, len(omegas)):
        for side in itertools.combinations(range(len(omegas)), r):
            if abs(2 * sum(omegas[i] for i in side) - total) < CONSERVATION_TOL:
                return True
    return False


def coupling_constant(
    order: int,
    force_constant: float,
    frequencies: Sequence[float],
    G: float = 1.0,
    conserved: bool = True,
) -> float:
    """``G * phi / sqrt(prod(omega))``, or zero when momentum is not conserved."""
    if order not in (3, 4):
        raise ValueError(f"order must be 3 or 4, got {order}")
    if len(frequencies) != order:
        raise ValueError(f"order {order} needs {order} frequencies, got {len(frequencies)}")
    if any(w <= 0 for w in frequencies):
        raise ValueError("frequencies must be strictly positive")
    if not conserved:
        return 0.0
    return float(G * force_constant / np.sqrt(np.prod(frequencies)))


@dataclass
class PhononSystem:
    frequencies: tuple[float, ...]
    coupling3: dict[tuple[int, int, int], float] = field(default_factory=dict)
    coupling4: dict[tuple[int, int, int, int], float] = field(default_factory=dict)
    G: float = 1.0
    conserves: Callable[[Sequence[float], Sequence[int]], bool] = energy_conserving

    def __post_init__(self) -> None:
        self.frequencies = tuple(float(w) for w in self.frequencies)
        if not self.frequencies:
            raise ValueError("at least one phonon mode is required")
        if any(w <= 0 for w in self.frequencies):
            raise ValueError("frequencies must be strictly positive")
        self.coupling3 = _symmetric_table(self.coupling3, 3, self.n_phonons)
        self.coupling4 = _symmetric_table(self.coupling4, 4, self.n_phonons)

    @property
    def n_phonons(self) -> int:
        return len(self.frequencies)

    @classmethod
    def from_force_constants(
        cls,
        frequencies: Sequence[float],
        phi3: Mapping[tuple[int, ...], float] | None = None,
        phi4: Mapping[tuple[int, ...], float] | None = None,
        G: float = 1.0,
    ) -> "PhononSystem":
        c3 = {}
        for modes, phi in (phi3 or {}).items():
            conserved = energy_conserving(frequencies, modes)
            c3[tuple(modes)] = coupling_constant(3, phi, [frequencies[m] for m in modes], G, conserved)
        c4 = {}
        for modes, phi in (phi4 or {}).items():
            conserved = energy_conserving(frequencies, modes)
            c4[tuple(modes)] = coupling_constant(4, phi, [frequencies[m] for m in modes], G, conserved)
        return cls(tuple(frequencies), c3, c4, G)

    def admitted(self, order: int) -> list[tuple[tuple[int, ...], float]]:
        table = self.coupling3 if order == 3 else self.coupling4
        return [
            (modes, value)
            for modes, value in sorted(table.items())
            if value != 0 and self.conserves(self.frequencies, modes)
        ]


def _symmetric_table(table: Mapping, order: int, n_phonons: int) -> dict:
    out: dict = {}
    for modes, value in table.items():
        modes = tuple(int(m) for m in modes)
        if len(modes) != order:
            raise ValueError(f"coupling key {modes} must have {order} modes")
        if any(not 0 <= m < n_phonons for m in modes):
            raise ValueError(f"coupling key {modes} references an unknown mode")
        key = tuple(sorted(modes))
        if key in out and not np.isclose(out[key], value):
            raise ValueError(f"coupling table not symmetric under permutation at {key}")
        out[key] = float(value)
    return out


def toy_model(phi3: float = 1.0, phi4: float = 0.0, G: float = 1.0) -> PhononSystem:
    """Three phonons: one at omega=1.0 splitting into two at omega=0.5."""
    frequencies = (1.0, 0.5, 0.5)
    phi4_table = {(0, 0, 1, 2): phi4} if phi4 else {}
    return PhononSystem.from_force_constants(frequencies, {(0, 1, 2): phi3}, phi4_table, G)


def _displacement_expansion(modes: Sequence[int], coefficient: float) -> list[LadderProduct]:
    # u = a_dagger(-lambda) + a(lambda); -lambda is identified with lambda
    products = []
    for kinds in itertools.product((Kind.CREATE, Kind.ANNIHILATE), repeat=len(modes)):
        factors = tuple(LadderOp(k, m) for k, m in zip(kinds, modes))
        products.append(LadderProduct(coefficient, factors))
    return products


def build_h3(system: PhononSystem) -> list[LadderProduct]:
    terms: list[LadderProduct] = []
    for modes, value in system.admitted(3):
        terms.extend(_displacement_expansion(modes, value))
    return terms


def build_h4(system: PhononSystem) -> list[LadderProduct]:
    terms: list[LadderProduct] = []
    for modes, value in system.admitted(4):
        terms.extend(_displacement_expansion(modes, value))
    return terms


def canonical_key(product: LadderProduct) -> tuple:
    """Ordering key treating ladder operators on different modes as commuting."""
    ordered = sorted(enumerate(product.factors), key=lambda item: (item[1].mode, item[0]))
    return tuple((op.kind.value, op.mode) for _, op in ordered)


def fock_matrix(terms: Sequence[LadderProduct], space: FockSpace) -> np.ndarray:
    out = np.zeros((space.dimension, space.dimension), dtype=complex)
    for term in terms:
        out += embed(term, space)
    return out


@dataclass(frozen=True)
class MappedHamiltonian:
    pauli: PauliSum
    layout: EncodingLayout
    penalty_weight: float
    physical: PauliSum

    @property
    def width(self) -> int:
        return self.pauli.width


def leakage_penalty(layout: EncodingLayout) -> PauliSum:
    """``sum_m (N_m - 1)**2`` with ``N_m`` the number of hot level qubits of phonon m."""
    width = layout.n_qubits
    total = PauliSum(width)
    one = PauliSum.identity(width)
    for m in range(layout.n_phonons):
        count = PauliSum(width)
        for n in range(layout.levels_per_phonon):
            count = count + occupancy_projector(layout, m, n)
        excess = count - one
        total = total + excess * excess
    return total


def map_hamiltonian(
    terms: Sequence[LadderProduct],
    layout: EncodingLayout,
    penalty_weight: float | None = None,
) -> MappedHamiltonian:
    """Encode ladder-form terms into a Hermitian Pauli sum plus leakage penalty.

    ``penalty_weight=None`` picks ten times the 1-norm of the mapped terms.
    """
    width = layout.n_qubits
    physical = PauliSum(width)
    for term in terms:
        physical = physical + encode_product(term, layout)
    if not physical.is_hermitian():
        raise ValueError("mapped Hamiltonian is not Hermitian; the term list is not adjoint-closed")
    physical = physical.real().simplify()
    if penalty_weight is None:
        penalty_weight = 10.0 * physical.norm1()
    if penalty_weight < 0:
        raise ValueError("penalty_weight must be non-negative")
    full = physical
    if penalty_weight > 0:
        full = physical + leakage_penalty(layout).scaled(penalty_weight)
    return MappedHamiltonian(full.real().simplify(), layout, float(penalty_weight), physical)


def exact_ground_energy(h: MappedHamiltonian | PauliSum) -> float:
    psum = h.pauli if isinstance(h, MappedHamiltonian) else h
    if not psum.terms:
        return 0.0
    return float(np.linalg.eigvalsh(to_matrix(psum))[0])


def subspace_ground_energy(h: MappedHamiltonian) -> float:
    """Lowest eigenvalue of the physical part restricted to one-hot states."""
    block = restrict_to_one_hot(to_matrix(h.physical), h.layout)
    return float(np.linalg.eigvalsh(block)[0])


def splitting_states(space: FockSpace, modes: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Initial ``|1_l, 0, 0>`` and final ``|0, 1_l1, 1_l2>`` Fock states of a splitting."""
    lam, lam1, lam2 = modes
    initial = [0] * space.n_phonons
    initial[lam] = 1
    final = [0] * space.n_phonons
    final[lam1] += 1
    final[lam2] += 1
    return space.basis_state(initial), space.basis_state(final)


def structural_element(system: PhononSystem, levels_per_phonon: int = 2) -> float:
    """Zero-temperature ``|<f|H3|i>|**2 / |H3|**2`` for the first admitted splitting."""
    admitted = system.admitted(3)
    if not admitted:
        return 0.0
    modes, value = admitted[0]
    lam = max(modes, key=lambda m: system.frequencies[m])
    rest = [m for m in modes if m != lam]
    if len(rest) != 2:
        raise ValueError(f"triple {modes} is not a one-to-two splitting")
    space = FockSpace(system.n_phonons, levels_per_phonon)
    initial, final = splitting_states(space, (lam, rest[0], rest[1]))
    amplitude = final.conj() @ fock_matrix(_displacement_expansion(modes, 1.0), space) @ initial
    return float(abs(amplitude) ** 2)


def matrix_element_splitting(
    occupations: Sequence[float],
    coupling_sq: float = 1.0,
    structural: float = 1.0,
) -> float:
    """``n(1+n1)(1+n2) |H3|**2`` times the zero-temperature structural element."""
    if len(occupations) != 3:
        raise ValueError("splitting needs three occupations")
    n, n1, n2 = occupations
    if min(occupations) < 0:
        raise ValueError("occupations must be non-negative")
    return float(n * (1 + n1) * (1 + n2) * coupling_sq * structural)


def h4_wick_element(ops: Sequence[LadderOp] | LadderProduct, space: FockSpace) -> complex:
    """Vacuum four-point function of an H4 term via its Wick pairings."""
    if isinstance(ops, LadderProduct):
        coefficient, ops = ops.coefficient, ops.factors
    else:
        coefficient = 1.0
    if len(ops) != 4:
        raise ValueError(f"an H4 term has exactly 4 ladder operators, got {len(ops)}")
    return coefficient * wick_expectation(ops, space)
