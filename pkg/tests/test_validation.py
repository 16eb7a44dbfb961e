import numpy as np
import pytest

from cbvqe.analysis import prepare
from cbvqe.fixtures import load_fixture
from cbvqe.validation import MIN_REPLICAS, joint_group_variance, sample_h22, validate
from cbvqe.shots import group_sigmas


def test_synthetic_all_checks_pass(synthetic):
    summary = validate(synthetic, total_shots=100_000, replicas=10_000, seed=0)
    assert summary.all_passed is True
    assert {c.name for c in summary.checks} >= {"var(H22)", "var(lambda) vs K/M"}


def test_joint_sampling_checks_pass(synthetic):
    summary = validate(synthetic, total_shots=100_000, replicas=3_000, seed=4, sampling="joint")
    assert summary.all_passed is True


def test_single_replica_has_no_verdict(synthetic):
    summary = validate(synthetic, replicas=1)
    assert summary.all_passed is None
    assert any("insufficient replicas" in w for w in summary.warnings)
    assert all(c.passed is None for c in summary.checks)
    assert "n/a" in summary.format()


def test_replica_threshold(synthetic):
    assert validate(synthetic, total_shots=10_000, replicas=MIN_REPLICAS - 1).all_passed is None
    assert validate(synthetic, total_shots=10_000, replicas=MIN_REPLICAS).all_passed is not None


def test_same_seed_same_text(synthetic):
    a = validate(synthetic, total_shots=20_000, replicas=500, seed=7).format()
    b = validate(synthetic, total_shots=20_000, replicas=500, seed=7).format()
    c = validate(synthetic, total_shots=20_000, replicas=500, seed=8).format()
    assert a == b != c


def test_deterministic_overlap_passes(h2):
    summary = validate(h2, total_shots=100_000, replicas=2_000, seed=1)
    zero = [c for c in summary.checks if c.predicted == 0]
    assert zero and all(c.empirical == 0 and c.passed for c in zero)
    assert summary.all_passed is True


def test_joint_group_variance_matches_dense_covariance(h2):
    """Group variance from the rotated distribution equals <G^2> - <G>^2 built densely."""
    from conftest import dense_oracle
    from cbvqe.pauli import PauliSum

    setup = prepare(h2)
    a = setup.phi_q.amplitudes
    for g in setup.groups:
        sub = PauliSum.from_terms(h2.n_qubits, [h2.terms[k] for k in g])
        m = dense_oracle(sub)
        mean = np.vdot(a, m @ a).real
        second = np.vdot(a, m @ m @ a).real
        assert joint_group_variance(h2, setup.phi_q, g) == pytest.approx(second - mean**2, abs=1e-12)


def test_independent_h22_sampling_is_unbiased(h2):
    setup = prepare(h2)
    rng = np.random.default_rng(0)
    shots = [200] * len(setup.groups)
    draws = sample_h22(h2, setup.phi_q, setup.groups, shots, 4000, rng)
    sigmas = group_sigmas(h2, setup.phi_q, setup.groups)
    predicted = sum(s * s / 200 for s in sigmas)
    assert draws.mean() == pytest.approx(setup.problem.h_bar[1, 1], abs=5 * np.sqrt(predicted / 4000))
    assert draws.var(ddof=1) == pytest.approx(predicted, rel=0.1)


def test_classically_solved_skips_sampling():
    from cbvqe.pauli import PauliSum, PauliTerm

    H = PauliSum.from_terms(2, [PauliTerm.from_string("Z0", 0.5), PauliTerm.from_string("Z1", 0.2)])
    summary = validate(H, replicas=200)
    assert summary.checks == [] and summary.all_passed is None


def test_argument_errors(synthetic):
    with pytest.raises(ValueError):
        validate(synthetic, total_shots=0)
    with pytest.raises(ValueError):
        validate(synthetic, sampling="bogus")


@pytest.mark.parametrize("name", ["h2_631g_8q", "h4_sto3g_8q"])
def test_larger_fixtures_eigenvalue_variance(name):
    summary = validate(load_fixture(name), total_shots=200_000, replicas=2_000, seed=3)
    lam = next(c for c in summary.checks if c.name.startswith("var(lambda)"))
    assert lam.passed
