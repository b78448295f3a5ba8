from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from qphonon.circuits import Circuit, Gate, bind, build_custom_ansatz, build_efficient_su2, transpile_cnot_to_ecr
from qphonon.engine import (
    Counts,
    DensityMatrix,
    NoiseModel,
    SimulationError,
    StateVector,
    allocate_shots,
    confusion_matrix,
    depolarizing_from_fidelity,
    depolarizing_gate_fidelity,
    estimate_expectation,
    expectation,
    measured_expectation,
    preset,
    run_density,
    run_statevector,
    sample,
)
from qphonon.pauli import PauliSum, to_matrix


def _random_circuit(rng, width=6, depth=30):
    gates = []
    for _ in range(depth):
        kind = rng.choice(["RX", "RY", "RZ", "CNOT", "CZ", "ECR"])
        if kind in ("CNOT", "CZ", "ECR"):
            gates.append(Gate(kind, tuple(int(x) for x in rng.choice(width, 2, replace=False))))
        else:
            gates.append(Gate(kind, (int(rng.integers(width)),), angle=float(rng.uniform(-np.pi, np.pi))))
    return Circuit(width, tuple(gates))


def _random_sum(rng, width, n_terms=8):
    terms = ["".join(rng.choice(list("IXYZ"), width)) for _ in range(n_terms)]
    return PauliSum(width, [(float(rng.normal()), t) for t in terms]).simplify()


def test_statevector_examples(backend):
    np.testing.assert_allclose(run_statevector(Circuit(3)).data, np.eye(8)[0])
    psi = run_statevector(Circuit(2, (Gate("X", (0,)),))).data
    np.testing.assert_allclose(psi, [0, 0, 1, 0])  # |10>
    with pytest.raises(SimulationError):
        run_statevector(build_custom_ansatz(6))


def test_noiseless_density_matches_statevector(backend):
    rng = np.random.default_rng(1)
    c = _random_circuit(rng)
    psi = run_statevector(c).data
    rho = run_density(c, NoiseModel()).data
    np.testing.assert_allclose(rho, np.outer(psi, psi.conj()), atol=1e-10)


def test_full_depolarization_on_pair(backend):
    c = Circuit(3, (Gate("RY", (0,), angle=0.7), Gate("ECR", (0, 1)), Gate("X", (2,))))
    rho = run_density(c, NoiseModel(depolarizing_p=1.0)).data.reshape((2,) * 6)
    pair = np.einsum("abcdec->abde", rho).reshape(4, 4)
    np.testing.assert_allclose(pair, np.eye(4) / 4, atol=1e-12)


def test_purity_decreases_with_p(backend):
    c = bind(build_custom_ansatz(6), np.random.default_rng(2).uniform(-np.pi, np.pi, 24))
    purities = [run_density(c, NoiseModel(depolarizing_p=p)).purity() for p in (0, 0.01, 0.05, 0.1)]
    assert purities[0] == pytest.approx(1.0)
    assert all(a > b for a, b in zip(purities, purities[1:]))


@pytest.mark.parametrize("noise", [NoiseModel(depolarizing_p=0.05), preset("ibm_brisbane"),
                                   NoiseModel(idle_t1=5.0, idle_t2=3.0, single_qubit_p=0.01)])
def test_density_trace_and_positivity(backend, noise):
    c = transpile_cnot_to_ecr(bind(build_efficient_su2(4, 2), np.random.default_rng(5).normal(size=24)))
    rho = run_density(c, noise)
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(rho.data, rho.data.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho.data).min() >= -1e-9


def test_density_width_cap():
    with pytest.raises(SimulationError):
        DensityMatrix.zero(11)


def test_expectation_examples(backend):
    assert expectation(StateVector.zero(1), PauliSum(1, [(1, "Z")])) == pytest.approx(1.0)
    mixed = DensityMatrix(np.eye(8, dtype=complex) / 8, 3)
    assert expectation(mixed, PauliSum(3, [(0.3, "XYZ"), (-2, "ZII")])) == pytest.approx(0.0)
    with pytest.raises(SimulationError):
        expectation(StateVector.zero(1), PauliSum(1, [(1j, "X")]))
    with pytest.raises(SimulationError):
        expectation(StateVector.zero(2), PauliSum(1, [(1, "X")]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_expectation_matches_dense_form(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(4, rng)
    h = _random_sum(rng, 4)
    dense = to_matrix(h)
    assert expectation(StateVector(psi, 4), h) == pytest.approx(np.real(psi.conj() @ dense @ psi), abs=1e-10)
    rho = np.outer(psi, psi.conj()) * 0.7 + np.eye(16) * 0.3 / 16
    assert expectation(DensityMatrix(rho, 4), h) == pytest.approx(np.real(np.trace(rho @ dense)), abs=1e-10)


def test_kernels_agree_across_backends():
    from conftest import BACKENDS

    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    py, cy = (b.values[0] for b in BACKENDS)
    rng = np.random.default_rng(9)
    n = 5
    u2 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    u1 = np.ascontiguousarray(u2[:2, :2])
    psi = random_state(n, rng)
    for q0, q1 in [(0, 4), (3, 1), (2, 3)]:
        a, b = psi.copy(), psi.copy()
        py.apply_2q(a, u2, q0, q1, n)
        cy.apply_2q(b, u2, q0, q1, n)
        np.testing.assert_allclose(a, b, atol=1e-12)
    a, b = psi.copy(), psi.copy()
    py.apply_1q(a, u1, 2, n)
    cy.apply_1q(b, u1, 2, n)
    np.testing.assert_allclose(a, b, atol=1e-12)
    rho = np.outer(psi, psi.conj())
    ra, rb = rho.copy(), rho.copy()
    py.depolarize_pair(ra, 1, 3, n, 0.2)
    cy.depolarize_pair(rb, 1, 3, n, 0.2)
    np.testing.assert_allclose(ra, rb, atol=1e-12)
    for xm, zm, ny in [(0b10110, 0b00111, 1), (0, 0b11111, 0), (0b11111, 0b11111, 5)]:
        assert py.pauli_expval_sv(psi, xm, zm, ny) == pytest.approx(cy.pauli_expval_sv(psi, xm, zm, ny), abs=1e-12)
        assert py.pauli_expval_dm(rho, xm, zm, ny) == pytest.approx(cy.pauli_expval_dm(rho, xm, zm, ny), abs=1e-12)


def test_sampling_examples(backend):
    counts = sample(StateVector.zero(3), None, 1000, seed=0)
    assert counts.counts == {"000": 1000}
    one = StateVector(np.array([0, 1], dtype=complex), 1)
    noise = NoiseModel(readout=(confusion_matrix(0.0148, 0.0),))
    frac = sample(one, None, 10**6, noise, seed=4).counts.get("0", 0) / 1e6
    assert abs(frac - 0.0148) < 0.0004
    a = sample(one, None, 500, noise, seed=11)
    b = sample(one, None, 500, noise, seed=11)
    assert a.counts == b.counts
    with pytest.raises(ValueError):
        sample(one, None, 0)


def test_counts_invariant():
    with pytest.raises(ValueError):
        Counts({"0": 3}, 4, 1)
    c = Counts.from_array(np.array([1, 0, 3, 0]), 2)
    assert c.counts == {"00": 1, "10": 3} and c.shots == 4


def test_depolarizing_fidelity_examples():
    assert depolarizing_gate_fidelity(0.0) == 1.0
    assert depolarizing_gate_fidelity(1.0) == pytest.approx(1 / 16)
    assert depolarizing_from_fidelity(depolarizing_gate_fidelity(0.3)) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        depolarizing_gate_fidelity(1.5)


@pytest.mark.parametrize("p", [0.0, 0.01, 0.2, 1.0])
def test_depolarizing_fidelity_from_process_matrix(p):
    # Kraus set: sqrt(1 - 15p/16) I plus sqrt(p/16) P for the 15 non-identity Paulis
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    kraus = []
    for i, a in enumerate(paulis):
        for j, b in enumerate(paulis):
            weight = 1 - 15 * p / 16 if i == j == 0 else p / 16
            kraus.append(np.sqrt(weight) * np.kron(a, b))
    fidelity = sum(abs(np.trace(k)) ** 2 for k in kraus) / 16
    assert fidelity == pytest.approx(depolarizing_gate_fidelity(p), abs=1e-12)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(depolarizing_p=1.2)
    with pytest.raises(ValueError):
        NoiseModel(readout=(np.array([[0.9, 0.2], [0.2, 0.8]]),))
    with pytest.raises(ValueError):
        NoiseModel(idle_t1=10.0, idle_t2=30.0)
    with pytest.raises(ValueError):
        NoiseModel(idle_t1=10.0)
    with pytest.raises(ValueError):
        preset("nonexistent")


def test_brisbane_preset_values():
    noise = preset("ibm_brisbane")
    assert depolarizing_gate_fidelity(noise.depolarizing_p) == pytest.approx(1 - 0.008471)
    np.testing.assert_allclose(noise.readout_matrix(3), [[0.9892, 0.0148], [0.0108, 0.9852]])
    assert (noise.idle_t1, noise.idle_t2) == (224.67, 140.09)


def test_shot_allocation():
    h = PauliSum(2, [(1.0, "II"), (3.0, "ZZ"), (0.01, "XX")])
    assert allocate_shots(h, 4096) == [0, 4082, 64]


def test_sampling_convergence_single_pauli(backend):
    rng = np.random.default_rng(0)
    inside = 0
    trials = 100
    for t in range(trials):
        psi = StateVector(random_state(3, rng), 3)
        axes = "".join(rng.choice(list("XYZ"), 3))
        h = PauliSum(3, [(1.0, axes)])
        est, _ = estimate_expectation(psi, h, 4096, seed=t)
        inside += abs(est - expectation(psi, h)) < 4 / np.sqrt(4096)
    assert inside >= 99


def test_measured_expectation_readout_bias():
    noise = NoiseModel(readout=(confusion_matrix(0.1, 0.05),))
    z = PauliSum(1, [(1.0, "Z")])
    # |0>: P(measure 1) = 0.05, so <Z> = 0.9
    assert measured_expectation(StateVector.zero(1), z, noise) == pytest.approx(0.9)


def test_idle_noise_only_touches_busy_qubits():
    noise = NoiseModel(idle_t1=1.0, idle_t2=1.0)
    c = Circuit(3, (Gate("RY", (0,), angle=np.pi / 2), Gate("CNOT", (0, 1)), Gate("CNOT", (0, 1))))
    rho = run_density(c, noise)
    # qubit 2 was never used: it stays exactly in |0>
    reduced = np.einsum("abcdec->abde", rho.data.reshape((2,) * 6))
    assert np.trace(reduced.reshape(4, 4)).real == pytest.approx(1.0)
    z2 = PauliSum(3, [(1.0, "IIZ")])
    assert expectation(rho, z2) == pytest.approx(1.0)
