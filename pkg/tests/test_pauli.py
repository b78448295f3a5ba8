from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qphonon.bosonic import FockSpace, LadderProduct, annihilate, create, embed
from qphonon.pauli import (
    EncodingLayout,
    PauliSum,
    PauliTerm,
    encode_ladder,
    encode_number,
    encode_product,
    is_hermitian,
    multiply,
    restrict_to_one_hot,
    simplify,
    to_matrix,
)

P = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def test_multiply_examples():
    assert multiply(PauliTerm(1, "X"), PauliTerm(1, "Y")) == PauliTerm(1j, "Z")
    # X.X = I and Z.X = iY
    assert multiply(PauliTerm(1, "XZ"), PauliTerm(1, "XX")) == PauliTerm(1j, "IY")
    assert multiply(PauliTerm(2.5, "XYZ"), PauliTerm(1, "III")) == PauliTerm(2.5, "XYZ")
    with pytest.raises(ValueError):
        multiply(PauliTerm(1, "X"), PauliTerm(1, "XX"))


@pytest.mark.parametrize("a, b", list(itertools.product("IXYZ", repeat=2)))
def test_multiply_phase_exact(a, b):
    prod = multiply(PauliTerm(1, a), PauliTerm(1, b))
    np.testing.assert_allclose(prod.coefficient * P[prod.axes], P[a] @ P[b], atol=0)


def test_simplify_examples():
    assert simplify(PauliSum(1, [(1, "X"), (1, "X")])).terms == (PauliTerm(2, "X"),)
    assert len(simplify(PauliSum(1, [(1, "X"), (-1, "X")]))) == 0
    s = PauliSum(2, [(1, "ZZ"), (1, "XI"), (0.5, "IY")]).simplify()
    assert [t.axes for t in s] == ["IY", "XI", "ZZ"]


def test_to_matrix_examples():
    np.testing.assert_allclose(to_matrix(PauliSum(1, [(1, "Z")])), np.diag([1, -1]))
    m = to_matrix(PauliSum(2, [(1, "XX"), (1, "YY")]))
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 2
    np.testing.assert_allclose(m, expected, atol=1e-15)
    with pytest.raises(ValueError):
        to_matrix(PauliSum(13, [(1, "Z" * 13)]))


def test_hermiticity_examples():
    assert is_hermitian(PauliSum(1, [(1, "X")]))
    assert not is_hermitian(PauliSum(1, [(1j, "X")]))


def test_term_validation():
    with pytest.raises(ValueError):
        PauliTerm(1, "XQ")
    with pytest.raises(ValueError):
        PauliTerm(float("inf"), "X")
    with pytest.raises(ValueError):
        PauliSum(2, [(1, "X")])


def test_serialization_roundtrip():
    s = PauliSum(6, [(0.25, "XIXIYZ"), (-1.5, "ZZIIII")]).simplify()
    text = s.dumps()
    assert "0.25 0.0 XIXIYZ" in text
    back = PauliSum.loads(text)
    assert back.terms == s.terms
    assert PauliSum(3).dumps() == ""


def test_layout_indexing():
    layout = EncodingLayout(3, 2)
    assert layout.n_qubits == 6
    indices = {layout.qubit_index(m, n) for m in range(3) for n in range(2)}
    assert indices == set(range(6))
    assert layout.qubit_index(1, 0) == 2


def test_table_one_creation_operator():
    # a-dagger of phonon 1 acts on its two level qubits (2, 3) only:
    # lower level loses the excitation, upper level gains it
    layout = EncodingLayout(3, 2)
    enc = encode_ladder(create(1), layout)
    sigma_minus = np.array([[0, 1], [0, 0]])  # |1> -> |0>
    sigma_plus = sigma_minus.T
    local = np.kron(sigma_minus, sigma_plus)
    full = np.kron(np.kron(np.eye(4), local), np.eye(4))
    np.testing.assert_allclose(to_matrix(enc), full, atol=1e-12)
    assert all(set(t.axes[:2] + t.axes[4:]) == {"I"} for t in enc)


@pytest.mark.parametrize("levels", [2, 3, 4])
def test_encoded_ladder_matches_fock(levels):
    layout = EncodingLayout(2, levels)
    space = FockSpace(2, levels)
    for op in (create(0), annihilate(0), create(1), annihilate(1)):
        enc = to_matrix(encode_ladder(op, layout))
        np.testing.assert_allclose(
            restrict_to_one_hot(enc, layout), embed(LadderProduct(1.0, (op,)), space), atol=1e-10
        )


def test_encoding_adjoint():
    layout = EncodingLayout(2, 3)
    a = to_matrix(encode_ladder(annihilate(0), layout))
    ad = to_matrix(encode_ladder(create(0), layout))
    np.testing.assert_allclose(a, ad.conj().T, atol=1e-12)


def _one_hot_vector(layout, occupations):
    v = np.zeros(2**layout.n_qubits)
    v[layout.one_hot_index(occupations)] = 1
    return v


def test_number_operator_on_one_hot_states():
    layout = EncodingLayout(1, 2)
    n0 = to_matrix(encode_number(0, layout))
    v = _one_hot_vector(layout, [1])
    assert v @ n0 @ v == pytest.approx(1.0)
    layout = EncodingLayout(3, 3)
    for occ in itertools.product(range(3), repeat=3):
        v = _one_hot_vector(layout, occ)
        for m in range(3):
            assert v @ to_matrix(encode_number(m, layout)) @ v == pytest.approx(occ[m])


def test_number_operator_index_guard():
    with pytest.raises(ValueError):
        encode_number(3, EncodingLayout(3, 2))
    with pytest.raises(ValueError):
        encode_ladder(create(5), EncodingLayout(3, 2))


toy_ops = st.sampled_from([create(m) for m in range(3)] + [annihilate(m) for m in range(3)])


@settings(max_examples=40, deadline=None)
@given(st.lists(toy_ops, min_size=1, max_size=4))
def test_encoding_homomorphism_on_toy_model(ops):
    layout = EncodingLayout(3, 2)
    product = LadderProduct(1.0, tuple(ops))
    restricted = restrict_to_one_hot(to_matrix(encode_product(product, layout)), layout)
    np.testing.assert_allclose(restricted, embed(product, FockSpace(3, 2)), atol=1e-10)


pauli_sums = st.lists(
    st.tuples(
        st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
        st.text("IXYZ", min_size=3, max_size=3),
    ),
    max_size=8,
).map(lambda terms: PauliSum(3, terms))


@settings(max_examples=60, deadline=None)
@given(pauli_sums)
def test_simplify_idempotent_and_matrix_preserving(s):
    once = s.simplify()
    assert once.simplify().terms == once.terms
    np.testing.assert_allclose(to_matrix(once), to_matrix(s), atol=1e-10)
    assert len({t.axes for t in once}) == len(once)


@settings(max_examples=60, deadline=None)
@given(pauli_sums, pauli_sums)
def test_product_matches_matrix_product(a, b):
    np.testing.assert_allclose(to_matrix(a * b), to_matrix(a) @ to_matrix(b), atol=1e-9)
