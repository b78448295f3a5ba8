from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest

from qphonon.bosonic import FockSpace, LadderProduct
from qphonon.hamiltonian import (
    PhononSystem,
    build_h3,
    build_h4,
    canonical_key,
    coupling_constant,
    exact_ground_energy,
    fock_matrix,
    h4_wick_element,
    leakage_penalty,
    map_hamiltonian,
    matrix_element_splitting,
    structural_element,
    subspace_ground_energy,
    toy_model,
)
from qphonon.bosonic import vacuum_expectation
from qphonon.pauli import EncodingLayout, PauliSum, restrict_to_one_hot, to_matrix
from qphonon.thermo import occupation


def test_coupling_constant_examples():
    assert coupling_constant(3, 1.0, (1.0, 0.5, 0.5), 1.0, True) == pytest.approx(2.0)
    assert coupling_constant(3, 1.0, (1.0, 0.5, 0.5), 1.0, False) == 0.0
    assert coupling_constant(3, 1.0, (1.0, 0.5, 0.5), 0.0, True) == 0.0
    with pytest.raises(ValueError):
        coupling_constant(3, 1.0, (1.0, 0.0, 0.5))
    with pytest.raises(ValueError):
        coupling_constant(4, 1.0, (1.0, 0.5, 0.5))


def test_system_validation():
    with pytest.raises(ValueError):
        PhononSystem((1.0, -0.5))
    with pytest.raises(ValueError):
        PhononSystem((1.0, 0.5, 0.5), {(0, 1, 2): 1.0, (2, 1, 0): 2.0})
    with pytest.raises(ValueError):
        PhononSystem((1.0, 0.5), {(0, 1, 5): 1.0})


def test_h3_toy_expansion():
    system = toy_model()
    terms = build_h3(system)
    assert len(terms) == 8
    assert {t.coefficient for t in terms} == {2.0}


def test_h3_empty_without_conserving_triple():
    system = PhononSystem.from_force_constants((1.0, 0.7, 0.5), {(0, 1, 2): 1.0})
    assert build_h3(system) == []


def _adjoint_closed(terms):
    keys = Counter((canonical_key(t), t.coefficient) for t in terms)
    adj = Counter((canonical_key(t.adjoint()), t.coefficient.conjugate()) for t in terms)
    return keys == adj


def test_h3_h4_adjoint_closed():
    system = toy_model(phi4=0.3)
    assert _adjoint_closed(build_h3(system))
    h4 = build_h4(system)
    assert len(h4) == 16
    assert _adjoint_closed(h4)
    assert build_h4(toy_model()) == []


def test_mapping_examples():
    layout = EncodingLayout(3, 2)
    empty = map_hamiltonian([], layout, 0.0)
    assert len(empty.pauli) == 0 and exact_ground_energy(empty) == 0.0
    h = map_hamiltonian(build_h3(toy_model()), layout, 0.0)
    assert h.width == 6 and h.pauli.is_hermitian()


def test_mapping_rejects_unbalanced_terms():
    from qphonon.bosonic import create

    with pytest.raises(ValueError):
        map_hamiltonian([LadderProduct(1.0, (create(0),))], EncodingLayout(3, 2), 0.0)


def test_penalty_enumeration():
    layout = EncodingLayout(3, 2)
    weight = 3.0
    diag = np.real(np.diag(to_matrix(leakage_penalty(layout).scaled(weight))))
    one_hot = set(layout.one_hot_indices().tolist())
    for idx in range(64):
        if idx in one_hot:
            assert abs(diag[idx]) < 1e-12
        else:
            assert diag[idx] >= weight - 1e-12


@pytest.mark.parametrize("phi4", [0.0, 0.4])
def test_encoding_oracle_and_penalty_ground_state(phi4):
    system = toy_model(phi4=phi4)
    terms = build_h3(system) + build_h4(system)
    layout = EncodingLayout(3, 2)
    h = map_hamiltonian(terms, layout)
    assert h.penalty_weight == pytest.approx(10 * h.physical.norm1())
    direct = fock_matrix(terms, FockSpace(3, 2))
    np.testing.assert_allclose(restrict_to_one_hot(to_matrix(h.physical), layout), direct, atol=1e-10)
    assert exact_ground_energy(h) == pytest.approx(subspace_ground_energy(h), abs=1e-9)
    assert exact_ground_energy(h) == pytest.approx(np.linalg.eigvalsh(direct)[0], abs=1e-9)


def test_exact_ground_energy_single_term():
    assert exact_ground_energy(PauliSum(3, [(1, "ZII")])) == pytest.approx(-1.0)


def test_toy_reference_energy(toy_h):
    assert exact_ground_energy(toy_h) == pytest.approx(-2.0, abs=1e-10)


@pytest.mark.parametrize("s", [0.5, 2.0, 3.7])
def test_gauge_scaling(s):
    layout = EncodingLayout(3, 2)
    base = exact_ground_energy(map_hamiltonian(build_h3(toy_model()), layout, 0.0))
    scaled = exact_ground_energy(map_hamiltonian(build_h3(toy_model(phi3=s)), layout, 0.0))
    assert scaled == pytest.approx(s * base, rel=1e-10)


def test_matrix_element_splitting_examples():
    assert matrix_element_splitting((0, 0, 0)) == 0.0
    assert matrix_element_splitting((1, 0, 0), 1.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        matrix_element_splitting((-1, 0, 0))
    scale = 1e11  # near-classical at 100 K
    occ = lambda T: [occupation(w, T, scale) for w in (1.0, 0.5, 0.5)]
    ratio = matrix_element_splitting(occ(300.0)) / matrix_element_splitting(occ(100.0))
    assert ratio == pytest.approx(27.0, rel=2e-3)


def test_structural_element_toy():
    assert structural_element(toy_model()) == pytest.approx(1.0)
    assert structural_element(toy_model(), levels_per_phonon=3) == pytest.approx(1.0)


def test_h4_wick_element_examples():
    from qphonon.bosonic import annihilate, create

    space = FockSpace(2, 4)
    ops = (annihilate(0), create(0), annihilate(1), create(1))
    assert h4_wick_element(ops, space) == pytest.approx(1.0)
    assert h4_wick_element((create(0),) * 4, space) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        h4_wick_element(ops[:3], space)


@pytest.mark.parametrize("levels", [3, 4])
def test_h4_wick_matches_direct(levels):
    system = PhononSystem.from_force_constants((1.0, 0.5, 0.5), {}, {(0, 0, 1, 2): 0.7})
    space = FockSpace(3, levels)
    for term in build_h4(system):
        assert h4_wick_element(term, space) == pytest.approx(vacuum_expectation(term, space), abs=1e-12)
