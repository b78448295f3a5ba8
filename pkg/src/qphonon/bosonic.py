"""Truncated Fock-space ladder operators and vacuum correlators.

Basis ordering: mode 0 is the leftmost (most significant) tensor slot, so the
Fock state ``|n_0, n_1, ...>`` has flat index ``sum n_m * L**(M-1-m)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

ZERO_TOL = 1e-12


class Kind(str, enum.Enum):
    CREATE = "create"
    ANNIHILATE = "annihilate"

    @property
    def dagger(self) -> "Kind":
        return Kind.ANNIHILATE if self is Kind.CREATE else Kind.CREATE


@dataclass(frozen=True)
class FockSpace:
    n_phonons: int
    levels_per_phonon: int

    def __post_init__(self) -> None:
        if self.n_phonons < 1:
            raise ValueError(f"n_phonons must be >= 1, got {self.n_phonons}")
        if self.levels_per_phonon < 2:
            raise ValueError(f"levels_per_phonon must be >= 2, got {self.levels_per_phonon}")

    @property
    def dimension(self) -> int:
        return self.levels_per_phonon**self.n_phonons

    @property
    def n_max(self) -> int:
        return self.levels_per_phonon - 1

    def index(self, occupations: Sequence[int]) -> int:
        """Flat basis index of the Fock state with the given occupations."""
        if len(occupations) != self.n_phonons:
            raise ValueError("one occupation per phonon required")
        idx = 0
        for n in occupations:
            if not 0 <= n < self.levels_per_phonon:
                raise ValueError(f"occupation {n} outside truncated range")
            idx = idx * self.levels_per_phonon + n
        return idx

    def basis_state(self, occupations: Sequence[int]) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=complex)
        vec[self.index(occupations)] = 1.0
        return vec

    def vacuum(self) -> np.ndarray:
        return self.basis_state([0] * self.n_phonons)


@dataclass(frozen=True)
class LadderOp:
    kind: Kind
    mode: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.mode < 0:
            raise ValueError(f"mode must be non-negative, got {self.mode}")

    def dagger(self) -> "LadderOp":
        return LadderOp(self.kind.dagger, self.mode)

    def __str__(self) -> str:
        return f"a{'+' if self.kind is Kind.CREATE else ''}{self.mode}"


def create(mode: int) -> LadderOp:
    return LadderOp(Kind.CREATE, mode)


def annihilate(mode: int) -> LadderOp:
    return LadderOp(Kind.ANNIHILATE, mode)


@dataclass(frozen=True)
class LadderProduct:
    """``coefficient * factors[0] @ factors[1] @ ...`` (rightmost acts first)."""

    coefficient: complex = 1.0
    factors: tuple[LadderOp, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        coeff = complex(self.coefficient)
        if not np.isfinite(coeff.real) or not np.isfinite(coeff.imag):
            raise ValueError("coefficient must be finite")
        object.__setattr__(self, "coefficient", coeff)
        object.__setattr__(self, "factors", tuple(self.factors))

    def adjoint(self) -> "LadderProduct":
        return LadderProduct(
            self.coefficient.conjugate(),
            tuple(op.dagger() for op in reversed(self.factors)),
        )

    def __mul__(self, other: "LadderProduct") -> "LadderProduct":
        if not isinstance(other, LadderProduct):
            return NotImplemented
        return LadderProduct(self.coefficient * other.coefficient, self.factors + other.factors)

    def scaled(self, factor: complex) -> "LadderProduct":
        return LadderProduct(self.coefficient * factor, self.factors)

    def key(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.kind.value, op.mode) for op in self.factors)

    def __str__(self) -> str:
        ops = " ".join(str(op) for op in self.factors) or "1"
        return f"({self.coefficient:.6g}) {ops}"


def ladder_matrix(kind: Kind | str, n_max: int) -> np.ndarray:
    """Dense ``(n_max+1) x (n_max+1)`` matrix of a or a-dagger.

    ``a-dagger |n> = sqrt(n+1) |n+1>`` puts the ``sqrt(n+1)`` entries on the
    subdiagonal; the annihilator is its conjugate transpose.
    """
    kind = Kind(kind)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    raising = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=-1).astype(complex)
    return raising if kind is Kind.CREATE else raising.conj().T


def _single_mode_matrix(op: LadderOp, space: FockSpace) -> np.ndarray:
    if op.mode >= space.n_phonons:
        raise ValueError(f"mode {op.mode} out of range for {space.n_phonons} phonons")
    eye = np.eye(space.levels_per_phonon, dtype=complex)
    local = ladder_matrix(op.kind, space.n_max)
    slots = [local if m == op.mode else eye for m in range(space.n_phonons)]
    return reduce(np.kron, slots)


def embed(product: LadderProduct, space: FockSpace) -> np.ndarray:
    """Dense matrix of ``product`` on the full truncated Fock space."""
    result = np.eye(space.dimension, dtype=complex)
    for op in product.factors:
        result = result @ _single_mode_matrix(op, space)
    return product.coefficient * result


def vacuum_expectation(product: LadderProduct, space: FockSpace) -> complex:
    vac = space.vacuum()
    return complex(vac.conj() @ embed(product, space) @ vac)


def wick_expectation(ops: Sequence[LadderOp], space: FockSpace) -> complex:
    """Sum over the three complete pairings of four ladder operators."""
    if len(ops) != 4:
        raise ValueError(f"wick_expectation needs exactly 4 operators, got {len(ops)}")

    def two_point(i: int, j: int) -> complex:
        return vacuum_expectation(LadderProduct(1.0, (ops[i], ops[j])), space)

    return (
        two_point(0, 1) * two_point(2, 3)
        + two_point(0, 2) * two_point(1, 3)
        + two_point(0, 3) * two_point(1, 2)
    )
