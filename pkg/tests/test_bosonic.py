from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qphonon.bosonic import (
    FockSpace,
    Kind,
    LadderOp,
    LadderProduct,
    annihilate,
    create,
    embed,
    ladder_matrix,
    vacuum_expectation,
    wick_expectation,
)


def test_lowest_truncation_create():
    m = ladder_matrix("create", 1)
    assert m.shape == (2, 2)
    np.testing.assert_allclose(m, [[0, 0], [1, 0]])


def test_annihilate_three_levels():
    a = ladder_matrix("annihilate", 2)
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a) == 2


def test_truncated_commutator():
    ad = ladder_matrix("create", 2)
    a = ladder_matrix("annihilate", 2)
    np.testing.assert_allclose(a @ ad - ad @ a, np.diag([1, 1, -2]), atol=1e-12)


@pytest.mark.parametrize("n_max", range(1, 9))
def test_adjoint_and_commutator_all_sizes(n_max):
    ad = ladder_matrix(Kind.CREATE, n_max)
    a = ladder_matrix(Kind.ANNIHILATE, n_max)
    np.testing.assert_array_equal(a, ad.conj().T)
    expected = np.eye(n_max + 1)
    expected[-1, -1] = -n_max
    np.testing.assert_allclose(a @ ad - ad @ a, expected, atol=1e-12)


def test_ladder_rejects_zero_nmax():
    with pytest.raises(ValueError):
        ladder_matrix("create", 0)


def test_fock_space_validation():
    assert FockSpace(3, 2).dimension == 8
    with pytest.raises(ValueError):
        FockSpace(0, 2)
    with pytest.raises(ValueError):
        FockSpace(2, 1)


def test_embed_identity_and_raising():
    space = FockSpace(2, 2)
    np.testing.assert_allclose(embed(LadderProduct(), space), np.eye(4))
    m = embed(LadderProduct(1.0, (create(0),)), space)
    out = m @ space.basis_state([0, 0])
    np.testing.assert_allclose(out, space.basis_state([1, 0]))


def test_embed_number_operator():
    space = FockSpace(1, 3)
    m = embed(LadderProduct(1.0, (create(0), annihilate(0))), space)
    np.testing.assert_allclose(m, np.diag([0, 1, 2]), atol=1e-12)


def test_embed_mode_out_of_range():
    with pytest.raises(ValueError):
        embed(LadderProduct(1.0, (create(2),)), FockSpace(2, 2))


@pytest.mark.parametrize(
    "ops, expected",
    [
        ((annihilate(0), create(0)), 1.0),
        ((create(0), annihilate(0)), 0.0),
        ((annihilate(0), annihilate(1), create(1), create(0)), 1.0),
    ],
)
def test_vacuum_expectation_examples(ops, expected):
    assert vacuum_expectation(LadderProduct(1.0, ops), FockSpace(2, 3)) == pytest.approx(expected)


def test_wick_examples():
    space = FockSpace(2, 3)
    assert wick_expectation([annihilate(0), create(0), annihilate(1), create(1)], space) == pytest.approx(1.0)
    assert wick_expectation([create(0), create(0), annihilate(0), annihilate(0)], space) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        wick_expectation([create(0)] * 3, space)


def _all_ops(n_modes):
    return [LadderOp(k, m) for k in Kind for m in range(n_modes)]


@pytest.mark.parametrize("n_modes", [1, 2])
@pytest.mark.parametrize("levels", [3, 4])
def test_wick_matches_direct_when_truncation_is_invisible(n_modes, levels):
    # four operators move at most two quanta away from the vacuum, so with
    # three or more levels the truncation never clips an intermediate state
    space = FockSpace(n_modes, levels)
    for ops in itertools.product(_all_ops(n_modes), repeat=4):
        direct = vacuum_expectation(LadderProduct(1.0, ops), space)
        assert abs(wick_expectation(ops, space) - direct) < 1e-12, ops


def test_wick_two_level_truncation_discrepancy():
    # with two levels a-dagger a-dagger |0> vanishes, while the pairing sum
    # still counts the two contractions of the untruncated oscillator
    space = FockSpace(1, 2)
    ops = (annihilate(0), annihilate(0), create(0), create(0))
    assert vacuum_expectation(LadderProduct(1.0, ops), space) == pytest.approx(0.0)
    assert wick_expectation(ops, space) == pytest.approx(2.0)
    assert vacuum_expectation(LadderProduct(1.0, ops), FockSpace(1, 3)) == pytest.approx(2.0)


def test_product_adjoint_reverses_and_swaps():
    p = LadderProduct(2 + 1j, (create(0), annihilate(1)))
    q = p.adjoint()
    assert q.coefficient == 2 - 1j
    assert q.factors == (create(1), annihilate(0))
    space = FockSpace(2, 3)
    np.testing.assert_allclose(embed(q, space), embed(p, space).conj().T, atol=1e-12)


def test_product_rejects_nonfinite():
    with pytest.raises(ValueError):
        LadderProduct(float("nan"), ())
    with pytest.raises(ValueError):
        LadderOp(Kind.CREATE, -1)


op_strategy = st.builds(LadderOp, st.sampled_from(list(Kind)), st.integers(0, 1))
product_strategy = st.builds(
    LadderProduct,
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.lists(op_strategy, max_size=3).map(tuple),
)


@settings(max_examples=60, deadline=None)
@given(product_strategy, product_strategy, st.integers(2, 4))
def test_embed_is_multiplicative(p, q, levels):
    space = FockSpace(2, levels)
    np.testing.assert_allclose(embed(p * q, space), embed(p, space) @ embed(q, space), atol=1e-9)
