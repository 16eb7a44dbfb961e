import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from cbvqe.errors import DimensionError
from cbvqe.fixtures import load_fixture
from cbvqe.pauli import PauliSum, PauliTerm
from cbvqe.statevec import (
    AnsatzSpec,
    Statevector,
    apply_ansatz,
    apply_hamiltonian,
    basis_statevector,
    count_coupling_blocks,
    deflate_quantum_state,
    exact_ground_state,
    expectation,
    hamming_weight_projection,
    overlaps_with_basis,
    pauli_expectation,
    select_reference_state,
    term_variance,
)

from conftest import dense_oracle, kron_matrix


def single(text, coeff=1.0, n=1):
    return PauliSum.from_terms(n, [PauliTerm.from_string(text, coeff, n)])


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return Statevector.from_array(v, normalize=True)


def tfim(n, g=1.1):
    terms = [PauliTerm.from_string(f"Z{q} Z{q + 1}", -1.0) for q in range(n - 1)]
    terms += [PauliTerm.from_string(f"X{q}", -g) for q in range(n)]
    terms += [PauliTerm.from_string("Z0", -0.05)]  # break the Z2 symmetry
    return PauliSum.from_terms(n, terms, label="tfim")


# --- basis states -------------------------------------------------------------


def test_basis_states():
    np.testing.assert_array_equal(basis_statevector(0, 1).amplitudes, [1, 0])
    np.testing.assert_array_equal(basis_statevector(1, 1).amplitudes, [0, 1])
    amps = basis_statevector(0b0011, 4).amplitudes
    assert amps[3] == 1 and np.count_nonzero(amps) == 1


def test_basis_state_out_of_range():
    with pytest.raises(DimensionError):
        basis_statevector(4, 2)


def test_statevector_is_read_only():
    psi = basis_statevector(0, 2)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2


# --- ground states ------------------------------------------------------------


def test_ground_state_of_z():
    gs = exact_ground_state(single("Z0"))
    assert gs.energy == pytest.approx(-1)
    np.testing.assert_allclose(np.abs(gs.state.amplitudes), [0, 1], atol=1e-14)


def test_ground_state_of_x():
    gs = exact_ground_state(single("X0"))
    assert gs.energy == pytest.approx(-1)
    overlap = np.vdot(np.array([1, -1]) / math.sqrt(2), gs.state.amplitudes)
    assert abs(overlap) == pytest.approx(1, abs=1e-14)


def test_h2_ground_energy_matches_dense_oracle(h2):
    oracle = float(np.linalg.eigvalsh(dense_oracle(h2))[0])
    gs = exact_ground_state(h2)
    assert gs.energy == pytest.approx(oracle, abs=1e-10)
    assert gs.energy == pytest.approx(-1.137270174, abs=1e-8)


@pytest.mark.parametrize("name", ["h2_631g_8q", "hubbard_4site_8q"])
def test_lanczos_agrees_with_dense(name):
    H = load_fixture(name)
    dense = exact_ground_state(H, dense_max_qubits=20)
    lanczos = exact_ground_state(H, dense_max_qubits=2)
    assert (dense.method, lanczos.method) == ("dense", "lanczos")
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-10)
    assert abs(np.vdot(dense.state.amplitudes, lanczos.state.amplitudes)) == pytest.approx(1, abs=1e-9)


def test_lanczos_on_complex_hamiltonian():
    H = PauliSum.from_terms(
        5, list(tfim(5).terms) + [PauliTerm.from_string("Y0 Z1 X2", 0.3), PauliTerm.from_string("Y3", 0.2)]
    )
    oracle = float(np.linalg.eigvalsh(dense_oracle(H))[0])
    assert exact_ground_state(H, dense_max_qubits=2).energy == pytest.approx(oracle, abs=1e-10)


def test_degenerate_ground_state_is_flagged():
    H = PauliSum.from_terms(2, [PauliTerm.from_string("Z0", 1.0)])
    assert exact_ground_state(H).degenerate


def test_qubit_cap(monkeypatch):
    H = tfim(4)
    with pytest.raises(DimensionError):
        exact_ground_state(H, qubit_cap=3)
    monkeypatch.setenv("CBVQE_MAX_QUBITS", "3")
    with pytest.raises(DimensionError):
        exact_ground_state(H)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_matrix_free_action_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = 4
    terms = [PauliTerm(int(x), int(z), float(c)) for x, z, c in zip(
        rng.integers(0, 16, 8), rng.integers(0, 16, 8), rng.standard_normal(8))]
    H = PauliSum.from_terms(n, terms)
    psi = random_state(n, seed)
    np.testing.assert_allclose(apply_hamiltonian(H, psi), dense_oracle(H) @ psi.amplitudes, atol=1e-12)


# --- expectations and variances ----------------------------------------------


def test_expectation_examples():
    assert expectation(single("Z0"), basis_statevector(0, 1)) == pytest.approx(1)
    plus = Statevector.from_array([1, 1], normalize=True)
    assert expectation(single("X0"), plus) == pytest.approx(1)


def test_expectation_in_ground_state(h2):
    gs = exact_ground_state(h2)
    assert expectation(h2, gs.state) == pytest.approx(gs.energy, abs=1e-10)


def test_expectation_dimension_mismatch(h2):
    with pytest.raises(DimensionError):
        expectation(h2, basis_statevector(0, 2))


def test_term_variance_examples():
    assert term_variance(PauliTerm.from_string("Z0"), basis_statevector(0, 1)) == 0
    assert term_variance(PauliTerm.from_string("X0"), basis_statevector(0, 1)) == pytest.approx(1)


def test_term_variance_requires_unit_coefficient():
    with pytest.raises(ValueError):
        term_variance(PauliTerm.from_string("X0", 0.5), basis_statevector(0, 1))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 10_000))
def test_term_variance_matches_dense(x, z, seed):
    P = PauliTerm(x, z)
    psi = random_state(4, seed)
    m = kron_matrix(P, 4)
    a = psi.amplitudes
    mean = np.vdot(a, m @ a).real
    second = np.vdot(a, m @ m @ a).real
    assert pauli_expectation(P, psi) == pytest.approx(mean, abs=1e-12)
    assert term_variance(P, psi) == pytest.approx(second - mean**2, abs=1e-12)


# --- overlaps and deflation ---------------------------------------------------


def test_overlaps_with_basis():
    assert overlaps_with_basis(basis_statevector(0, 1)) == {0: 1.0}
    plus = Statevector.from_array([1, 1], normalize=True)
    got = overlaps_with_basis(plus)
    assert got[0] == pytest.approx(1 / math.sqrt(2)) and got[1] == pytest.approx(1 / math.sqrt(2))


def test_overlap_uses_real_part():
    psi = Statevector.from_array([0.6, 0.8j])
    assert overlaps_with_basis(psi, support=[0, 1]) == {0: 0.6, 1: 0.0}


def test_deflate_plus_state():
    plus = Statevector.from_array([1, 1], normalize=True)
    alpha, phi = deflate_quantum_state(plus, 0)
    assert alpha == pytest.approx(1 / math.sqrt(2))
    np.testing.assert_allclose(phi.amplitudes, [0, 1], atol=1e-15)


def test_deflate_orthogonal_reference():
    gs = Statevector.from_array([0, 0.6, 0.8, 0])
    alpha, phi = deflate_quantum_state(gs, 0)
    assert alpha == 0
    np.testing.assert_allclose(phi.amplitudes, gs.amplitudes)


def test_deflate_basis_state_is_classical():
    assert deflate_quantum_state(basis_statevector(2, 2), 2) == (1.0, None)


def test_deflation_reconstructs_h2_ground_state(h2):
    gs = exact_ground_state(h2).state
    i0 = select_reference_state(gs, h2.n_electrons)
    alpha, phi = deflate_quantum_state(gs, i0)
    assert abs(phi.amplitudes[i0]) < 1e-14
    rebuilt = alpha * basis_statevector(i0, 4).amplitudes + math.sqrt(1 - alpha**2) * phi.amplitudes
    phase = gs.amplitudes[i0] / abs(gs.amplitudes[i0])
    np.testing.assert_allclose(rebuilt * phase, gs.amplitudes, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 7))
def test_deflation_identity_random(seed, i0):
    psi = random_state(3, seed)
    alpha, phi = deflate_quantum_state(psi, i0)
    assert 0 <= alpha < 1
    assert phi.norm() == pytest.approx(1)
    assert abs(phi.amplitudes[i0]) < 1e-15
    assert abs(psi.amplitudes[i0]) == pytest.approx(alpha)


def test_reference_state_sector_and_fallback():
    amps = np.zeros(8)
    amps[[0b111, 0b011, 0b101]] = [0.8, 0.5, 0.33]
    psi = Statevector.from_array(amps, normalize=True)
    assert select_reference_state(psi, 2) == 0b011
    assert select_reference_state(psi, None) == 0b111
    assert select_reference_state(psi, 1) == 0b111  # empty sector falls back


# --- ansatz -------------------------------------------------------------------


def test_zero_layers_is_reference():
    out = apply_ansatz(AnsatzSpec.zeros(4, 0, 0b0011))
    np.testing.assert_array_equal(out.amplitudes, basis_statevector(0b0011, 4).amplitudes)


def test_zero_angle_block_is_identity():
    out = apply_ansatz(AnsatzSpec(2, 1, [[0.0, 0.0]], 0b01))
    np.testing.assert_array_equal(out.amplitudes, basis_statevector(0b01, 2).amplitudes)


def test_block_rotates_within_single_excitation_space():
    out = apply_ansatz(AnsatzSpec(2, 1, [[math.pi / 2, 0.0]], 0b01))
    np.testing.assert_allclose(np.abs(out.amplitudes), [0, 0, 1, 0], atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_ansatz_conserves_particle_number(seed):
    spec = AnsatzSpec.random(4, 5, 0b0011, seed)
    psi = apply_ansatz(spec)
    assert psi.norm() == pytest.approx(1, abs=1e-12)
    assert hamming_weight_projection(psi, 2) == pytest.approx(1, abs=1e-12)


def test_coupling_blocks_small():
    assert count_coupling_blocks(AnsatzSpec.zeros(4, 4, 0b0011)) == (6, 2)
    assert count_coupling_blocks(AnsatzSpec.zeros(4, 0, 0b0011)) == (0, 0)


def enumerate_coupling_blocks(n, k, depth):
    """Count brick-layer blocks that do not leave |0..01..1> invariant."""
    ref = (1 << k) - 1
    total = coupling = 0
    for layer in range(depth):
        q = 0 if layer % 2 == 0 else 1
        while q + 1 < n:
            total += 1
            if ((ref >> q) & 1) != ((ref >> (q + 1)) & 1):
                coupling += 1
            q += 2
    return total, coupling


@pytest.mark.parametrize("n,k,depth", [(6, 2, 6), (6, 3, 6), (8, 4, 8), (5, 1, 3), (7, 4, 7)])
def test_coupling_blocks_match_enumeration(n, k, depth):
    spec = AnsatzSpec.zeros(n, depth, (1 << k) - 1)
    assert count_coupling_blocks(spec) == enumerate_coupling_blocks(n, k, depth)


def test_coupling_blocks_act_nontrivially_only_on_boundary():
    n, k, depth = 6, 2, 6
    ref = (1 << k) - 1
    spec = AnsatzSpec.zeros(n, depth, ref)
    moved = 0
    for b in range(len(spec.blocks)):
        angles = np.zeros((len(spec.blocks), 2))
        angles[b, 0] = 0.7
        out = apply_ansatz(AnsatzSpec(n, depth, angles, ref))
        moved += abs(out.amplitudes[ref]) < 1 - 1e-12
    assert moved == count_coupling_blocks(spec)[1] == 3


def test_coupling_blocks_need_lowest_filled():
    with pytest.raises(ValueError):
        count_coupling_blocks(AnsatzSpec.zeros(4, 2, 0b0101))


def test_exact_energy_below_ansatz_energy(h2):
    e0 = exact_ground_state(h2).energy
    for seed in range(3):
        psi = apply_ansatz(AnsatzSpec.random(4, 4, 0b0011, seed, real=True))
        assert expectation(h2, psi) >= e0 - 1e-12


def test_dense_eigh_is_used_as_reference():
    H = tfim(6)
    vals = scipy.linalg.eigh(dense_oracle(H), eigvals_only=True)
    gs = exact_ground_state(H)
    assert gs.energy == pytest.approx(vals[0], abs=1e-10)
    assert gs.gap == pytest.approx(vals[1] - vals[0], abs=1e-9)
