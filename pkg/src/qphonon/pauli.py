"""Pauli-string algebra and the one-hot boson-to-qubit encoding.

Strings are big-endian: character ``k`` of an axes string acts on qubit ``k``,
which is the most significant bit of a computational basis index.  A qubit in
``|1>`` marks an occupied boson level, so the occupancy projector is
``(I - Z) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .bosonic import Kind, LadderOp, LadderProduct

SIMPLIFY_TOL = 1e-12
HERMITIAN_TOL = 1e-10
MAX_MATRIX_WIDTH = 12

_AXES = "IXYZ"

# (a, b) -> (phase, c) with a @ b = phase * c for single-qubit Paulis
_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in _AXES:
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    axes: str

    def __post_init__(self) -> None:
        coeff = complex(self.coefficient)
        if not (np.isfinite(coeff.real) and np.isfinite(coeff.imag)):
            raise ValueError("coefficient must be finite")
        if not self.axes or any(ch not in _AXES for ch in self.axes):
            raise ValueError(f"invalid Pauli axes string {self.axes!r}")
        object.__setattr__(self, "coefficient", coeff)

    @property
    def width(self) -> int:
        return len(self.axes)

    @property
    def masks(self) -> tuple[int, int, int]:
        """``(xmask, zmask, ny)`` with ``P = i**ny * X^xmask Z^zmask``."""
        n = len(self.axes)
        xmask = zmask = ny = 0
        for q, ch in enumerate(self.axes):
            bit = 1 << (n - 1 - q)
            if ch in "XY":
                xmask |= bit
            if ch in "ZY":
                zmask |= bit
            if ch == "Y":
                ny += 1
        return xmask, zmask, ny

    def is_identity(self) -> bool:
        return set(self.axes) <= {"I"}


def multiply(lhs: PauliTerm, rhs: PauliTerm) -> PauliTerm:
    if lhs.width != rhs.width:
        raise ValueError(f"width mismatch: {lhs.width} vs {rhs.width}")
    phase: complex = 1
    out = []
    for a, b in zip(lhs.axes, rhs.axes):
        ph, c = _PRODUCT[(a, b)]
        phase *= ph
        out.append(c)
    return PauliTerm(lhs.coefficient * rhs.coefficient * phase, "".join(out))


class PauliSum:
    """Weighted sum of Pauli strings over a fixed register width."""

    __slots__ = ("width", "terms")

    def __init__(self, width: int, terms: Iterable[PauliTerm | tuple[complex, str]] = ()):
        if width < 1:
            raise ValueError(f"width must be >= 1, got {width}")
        self.width = width
        parsed = []
        for term in terms:
            if not isinstance(term, PauliTerm):
                term = PauliTerm(*term)
            if term.width != width:
                raise ValueError(f"term {term.axes!r} does not match width {width}")
            parsed.append(term)
        self.terms: tuple[PauliTerm, ...] = tuple(parsed)

    @classmethod
    def identity(cls, width: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(width, [PauliTerm(coefficient, "I" * width)])

    @classmethod
    def single(cls, width: int, qubit: int, axis: str, coefficient: complex = 1.0) -> "PauliSum":
        axes = ["I"] * width
        axes[qubit] = axis
        return cls(width, [PauliTerm(coefficient, "".join(axes))])

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"PauliSum(width={self.width}, terms={len(self.terms)})"

    def _check(self, other: "PauliSum") -> None:
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} vs {other.width}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        return PauliSum(self.width, self.terms + other.terms).simplify()

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other.scaled(-1)

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        return PauliSum(self.width, [multiply(a, b) for a in self.terms for b in other.terms]).simplify()

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.width, [PauliTerm(t.coefficient * factor, t.axes) for t in self.terms])

    def simplify(self, tol: float = SIMPLIFY_TOL) -> "PauliSum":
        merged: dict[str, complex] = {}
        for term in self.terms:
            merged[term.axes] = merged.get(term.axes, 0) + term.coefficient
        kept = [PauliTerm(c, axes) for axes, c in sorted(merged.items()) if abs(c) >= tol]
        return PauliSum(self.width, kept)

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.width, [PauliTerm(t.coefficient.conjugate(), t.axes) for t in self.terms])

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return all(abs(t.coefficient.imag) <= tol for t in self.simplify().terms)

    def norm1(self) -> float:
        return float(sum(abs(t.coefficient) for t in self.terms))

    def real(self) -> "PauliSum":
        """Drop imaginary parts; only valid for Hermitian sums."""
        return PauliSum(self.width, [PauliTerm(t.coefficient.real, t.axes) for t in self.terms])

    # text serialization: "coeff_re coeff_im AXES" per line
    def dumps(self) -> str:
        lines = [f"{t.coefficient.real!r} {t.coefficient.imag!r} {t.axes}" for t in self.terms]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def loads(cls, text: str, width: int | None = None) -> "PauliSum":
        terms = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 're im AXES', got {line!r}")
            terms.append(PauliTerm(complex(float(parts[0]), float(parts[1])), parts[2]))
        if width is None:
            if not terms:
                raise ValueError("cannot infer width of an empty Pauli sum")
            width = terms[0].width
        return cls(width, terms)


def simplify(psum: PauliSum) -> PauliSum:
    return psum.simplify()


def is_hermitian(psum: PauliSum) -> bool:
    return psum.is_hermitian()


def term_matrix(term: PauliTerm) -> np.ndarray:
    n = term.width
    if n > MAX_MATRIX_WIDTH:
        raise ValueError(f"width {n} exceeds dense-matrix guard of {MAX_MATRIX_WIDTH}")
    dim = 1 << n
    xmask, zmask, ny = term.masks
    cols = np.arange(dim, dtype=np.int64)
    parity = np.zeros(dim, dtype=np.int64)
    z = cols & zmask
    while z.any():
        parity ^= z & 1
        z = z >> 1
    mat = np.zeros((dim, dim), dtype=complex)
    mat[cols ^ xmask, cols] = (1j**ny) * (1 - 2 * parity) * term.coefficient
    return mat


def to_matrix(psum: PauliSum) -> np.ndarray:
    if psum.width > MAX_MATRIX_WIDTH:
        raise ValueError(f"width {psum.width} exceeds dense-matrix guard of {MAX_MATRIX_WIDTH}")
    dim = 1 << psum.width
    out = np.zeros((dim, dim), dtype=complex)
    for term in psum.terms:
        out += term_matrix(term)
    return out


# ---------------------------------------------------------------------------
# one-hot (unary) encoding


@dataclass(frozen=True)
class EncodingLayout:
    n_phonons: int
    levels_per_phonon: int

    def __post_init__(self) -> None:
        if self.n_phonons < 1 or self.levels_per_phonon < 2:
            raise ValueError("need n_phonons >= 1 and levels_per_phonon >= 2")

    @property
    def n_qubits(self) -> int:
        return self.n_phonons * self.levels_per_phonon

    def qubit_index(self, phonon: int, level: int) -> int:
        if not 0 <= phonon < self.n_phonons:
            raise ValueError(f"phonon {phonon} out of range")
        if not 0 <= level < self.levels_per_phonon:
            raise ValueError(f"level {level} out of range")
        return phonon * self.levels_per_phonon + level

    def one_hot_index(self, occupations: Sequence[int]) -> int:
        """Computational-basis index of the one-hot image of a Fock state."""
        if len(occupations) != self.n_phonons:
            raise ValueError("one occupation per phonon required")
        n = self.n_qubits
        idx = 0
        for m, level in enumerate(occupations):
            idx |= 1 << (n - 1 - self.qubit_index(m, level))
        return idx

    def one_hot_indices(self) -> np.ndarray:
        """Basis indices of all one-hot states, in Fock-space order."""
        levels = self.levels_per_phonon
        out = []
        for flat in range(levels**self.n_phonons):
            occ = []
            for _ in range(self.n_phonons):
                occ.append(flat % levels)
                flat //= levels
            out.append(self.one_hot_index(occ[::-1]))
        return np.array(out, dtype=np.int64)


def _sigma(layout: EncodingLayout, qubit: int, raising: bool) -> PauliSum:
    # raising maps |0> -> |1>: (X - iY)/2 ; lowering is its adjoint
    sign = -1j if raising else 1j
    return PauliSum(
        layout.n_qubits,
        [
            PauliTerm(0.5, _axes_with(layout.n_qubits, qubit, "X")),
            PauliTerm(0.5 * sign, _axes_with(layout.n_qubits, qubit, "Y")),
        ],
    )


def _axes_with(width: int, qubit: int, axis: str) -> str:
    axes = ["I"] * width
    axes[qubit] = axis
    return "".join(axes)


def encode_ladder(op: LadderOp, layout: EncodingLayout) -> PauliSum:
    """Pauli-sum image of a single ladder operator under one-hot encoding."""
    if op.mode >= layout.n_phonons:
        raise ValueError(f"mode {op.mode} out of range for {layout.n_phonons} phonons")
    width = layout.n_qubits
    total = PauliSum(width)
    for n in range(layout.levels_per_phonon - 1):
        lower_q = layout.qubit_index(op.mode, n)
        upper_q = layout.qubit_index(op.mode, n + 1)
        if op.kind is Kind.CREATE:
            piece = _sigma(layout, lower_q, raising=False) * _sigma(layout, upper_q, raising=True)
        else:
            piece = _sigma(layout, lower_q, raising=True) * _sigma(layout, upper_q, raising=False)
        total = total + piece.scaled(np.sqrt(n + 1))
    return total


def occupancy_projector(layout: EncodingLayout, phonon: int, level: int) -> PauliSum:
    q = layout.qubit_index(phonon, level)
    width = layout.n_qubits
    return PauliSum(width, [PauliTerm(0.5, "I" * width), PauliTerm(-0.5, _axes_with(width, q, "Z"))])


def encode_number(phonon: int, layout: EncodingLayout) -> PauliSum:
    if not 0 <= phonon < layout.n_phonons:
        raise ValueError(f"phonon {phonon} out of range")
    total = PauliSum(layout.n_qubits)
    for n in range(1, layout.levels_per_phonon):
        total = total + occupancy_projector(layout, phonon, n).scaled(n)
    return total


def encode_product(product: LadderProduct, layout: EncodingLayout) -> PauliSum:
    result = PauliSum.identity(layout.n_qubits, product.coefficient)
    for op in product.factors:
        result = result * encode_ladder(op, layout)
    return result


def restrict_to_one_hot(matrix: np.ndarray, layout: EncodingLayout) -> np.ndarray:
    """Project a qubit-space matrix onto the one-hot subspace (Fock ordering)."""
    idx = layout.one_hot_indices()
    return matrix[np.ix_(idx, idx)]
