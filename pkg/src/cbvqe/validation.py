"""End-to-end Monte Carlo check of the boosted-estimator variance model.

Each replica samples every overlap ``y_j`` with its allocated Hadamard-test
shots, samples ``H_22`` by grouped Pauli measurement, rebuilds the 2x2
problem and solves it. The spread of the resulting eigenvalues is compared
with the first-order prediction ``K / M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .analysis import BoostedSetup, prepare
from .hadamard import sample_estimates
from .pauli import PauliSum, PauliTerm, format_bitstring
from .shots import (
    H22_LABEL,
    VarianceTerm,
    group_sigmas,
    hf_variance_terms,
    k_prime_for_h22,
    optimal_allocation,
)
from .statevec import _basis_indices, pauli_expectation
from .subspace import SubspaceProblem, solve_real_gevp

MIN_REPLICAS = 100
DEFAULT_TOLERANCE = 0.2
DETERMINISTIC_TOL = 1e-12  # 1 - y^2 below this is a deterministic outcome

Sampling = Literal["independent", "joint"]


@dataclass(frozen=True)
class Check:
    name: str
    predicted: float
    empirical: float
    tolerance: float
    passed: bool | None

    @property
    def rel_error(self) -> float:
        if self.predicted == 0:
            return 0.0 if self.empirical == 0 else math.inf
        return abs(self.empirical - self.predicted) / self.predicted


@dataclass
class ValidationSummary:
    label: str
    total_shots: int
    replicas: int
    seed: int
    sampling: str
    alpha: float
    energy: float
    checks: list[Check] = field(default_factory=list)
    mean_eigenvalue: float = math.nan
    warnings: list[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool | None:
        verdicts = [c.passed for c in self.checks]
        if not verdicts or any(v is None for v in verdicts):
            return None
        return all(verdicts)

    def format(self) -> str:
        lines = [
            f"# validate {self.label}",
            f"shots={self.total_shots} replicas={self.replicas} seed={self.seed} sampling={self.sampling}",
            f"alpha={self.alpha:.10f} E_exact={self.energy:.10f} mean_lambda={self.mean_eigenvalue:.10f}",
        ]
        lines += [f"warning: {w}" for w in self.warnings]
        lines.append(f"{'check':<24}{'predicted':>16}{'empirical':>16}{'rel_err':>10}  status")
        for c in self.checks:
            status = "n/a" if c.passed is None else ("PASS" if c.passed else "FAIL")
            lines.append(
                f"{c.name:<24}{c.predicted:>16.6e}{c.empirical:>16.6e}{c.rel_error:>10.4f}  {status}"
            )
        verdict = self.all_passed
        lines.append("result: " + ("n/a" if verdict is None else ("PASS" if verdict else "FAIL")))
        return "\n".join(lines) + "\n"


def _rotate_to_z(amps: np.ndarray, n_qubits: int, x_mask: int, z_mask: int) -> np.ndarray:
    """Apply per-qubit basis changes so the group's Paulis become Z strings."""
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    hsdg = h @ np.diag([1, -1j])  # Y -> Z
    psi = amps.reshape([2] * n_qubits)
    for q in range(n_qubits):
        if not (x_mask >> q) & 1:
            continue
        gate = hsdg if (z_mask >> q) & 1 else h
        axis = n_qubits - 1 - q
        psi = np.moveaxis(np.tensordot(gate, psi, axes=([1], [axis])), 0, axis)
    return psi.reshape(-1)


def _group_outcomes(H: PauliSum, phi_q, group: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Outcome distribution of one qubitwise group and the estimator value per outcome.

    Returns ``(probs, values)`` over the ``2**n`` measured bitstrings, where
    ``values[b]`` is the group's energy contribution read off bitstring ``b``.
    """
    terms = [H.terms[k] for k in group if not H.terms[k].is_identity]
    x_mask = z_mask = 0
    for t in terms:
        x_mask |= t.x_mask
        z_mask |= t.z_mask
    probs = np.abs(_rotate_to_z(phi_q.amplitudes, H.n_qubits, x_mask, z_mask)) ** 2
    probs /= probs.sum()
    idx = _basis_indices(H.n_qubits)
    values = np.zeros(len(idx))
    for t in terms:
        parity = np.bitwise_count(idx & np.uint64(t.support)) & 1
        values += complex(t.coefficient).real * (1.0 - 2.0 * parity)
    return probs, values


def joint_group_variance(H: PauliSum, phi_q, group: list[int]) -> float:
    """Single-shot variance of a group estimate, covariances between its terms included."""
    probs, values = _group_outcomes(H, phi_q, group)
    mean = probs @ values
    return float(max(0.0, probs @ (values - mean) ** 2))


def sample_h22(
    H: PauliSum,
    phi_q,
    groups: list[list[int]],
    group_shots: list[int],
    replicas: int,
    rng: np.random.Generator,
    sampling: Sampling = "independent",
    chunk: int = 500,
) -> np.ndarray:
    """Replicas of the grouped estimate of ``<phi_q|H|phi_q>``.

    ``independent`` draws each term's ``+-1`` average on its own, which is
    exactly the covariance-free model behind ``K'``. ``joint`` samples full
    bitstrings in each group's measurement basis, so terms in one group share
    shots and covariances are present.
    """
    est = np.full(replicas, complex(H.identity_coefficient).real)
    for g, m in zip(groups, group_shots):
        terms = [H.terms[k] for k in g if not H.terms[k].is_identity]
        if not terms:
            continue
        coeffs = np.array([complex(t.coefficient).real for t in terms])
        if m == 0:
            exact = np.array([pauli_expectation(PauliTerm(t.x_mask, t.z_mask), phi_q) for t in terms])
            est += coeffs @ exact
            continue
        if sampling == "independent":
            p = np.array([0.5 * (1 + pauli_expectation(PauliTerm(t.x_mask, t.z_mask), phi_q)) for t in terms])
            counts = rng.binomial(m, np.clip(p, 0.0, 1.0), size=(replicas, len(terms)))
            est += (2.0 * counts / m - 1.0) @ coeffs
        else:
            probs, values = _group_outcomes(H, phi_q, g)
            for start in range(0, replicas, chunk):
                stop = min(replicas, start + chunk)
                est[start:stop] += rng.multinomial(m, probs, size=stop - start) @ values / m
    return est


def validate(
    H: PauliSum,
    total_shots: int = 100_000,
    replicas: int = 10_000,
    seed: int = 0,
    hf_state: int | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    sampling: Sampling = "independent",
    setup: BoostedSetup | None = None,
) -> ValidationSummary:
    """Monte Carlo replicas of the boosted estimator against the variance model."""
    if total_shots < 1 or replicas < 1:
        raise ValueError("shots and replicas must be positive")
    if sampling not in ("independent", "joint"):
        raise ValueError(f"unknown sampling mode {sampling!r}")
    setup = setup or prepare(H, hf_state)
    summary = ValidationSummary(
        H.label, total_shots, replicas, seed, sampling, setup.alpha, setup.energy
    )
    if setup.classically_solved:
        summary.warnings.append("reference state is the exact ground state; nothing to sample")
        summary.mean_eigenvalue = setup.energy
        return summary
    judge = replicas >= MIN_REPLICAS
    if not judge:
        summary.warnings.append(f"insufficient replicas ({replicas} < {MIN_REPLICAS}); no pass/fail")

    k_prime = k_prime_for_h22(H, setup.phi_q, setup.groups)
    terms = hf_variance_terms(setup.alpha, setup.energy, setup.cross_elements, setup.overlaps, k_prime, setup.i0)
    plan = optimal_allocation(terms, total_shots)
    overlap_terms = [t for t in plan.terms if t.label != H22_LABEL]
    m_prime = plan.shots_for(H22_LABEL)

    sigmas = group_sigmas(H, setup.phi_q, setup.groups)
    if m_prime > 0:
        inner = optimal_allocation([VarianceTerm(k, 1.0, s * s) for k, s in enumerate(sigmas)], m_prime)
        group_shots = [t.shots for t in inner.terms]
        if sampling == "joint":
            h22_predicted = sum(
                joint_group_variance(H, setup.phi_q, g) / m for g, m in zip(setup.groups, group_shots) if m > 0
            )
        else:
            h22_predicted = inner.achieved_variance
    else:
        group_shots = [0] * len(sigmas)
        h22_predicted = 0.0

    rng = np.random.default_rng(seed)
    y_true = [setup.overlaps[t.label] for t in overlap_terms]
    y_hat = sample_estimates(y_true, [t.shots for t in overlap_terms], replicas, rng)
    h22_hat = sample_h22(H, setup.phi_q, setup.groups, group_shots, replicas, rng, sampling)

    labels = [t.label for t in overlap_terms]
    cross = np.array([complex(setup.cross_elements.get(j, 0.0)).real for j in labels])
    i0_col = labels.index(setup.i0)
    h11 = float(setup.problem.h_bar[0, 0])
    lam = np.empty(replicas)
    for r in range(replicas):
        h12 = float(y_hat[r] @ cross)
        s12 = float(y_hat[r, i0_col])
        p = SubspaceProblem(np.array([[h11, h12], [h12, h22_hat[r]]]), np.array([[1.0, s12], [s12, 1.0]]))
        lam[r] = solve_real_gevp(p).eigenvalues[0]
    summary.mean_eigenvalue = float(lam.mean())

    def var(x):
        return float(np.var(x, ddof=1)) if replicas > 1 else math.nan

    def check(name, predicted, empirical):
        ok = None
        if judge:
            if predicted > 0:
                ok = abs(empirical - predicted) <= tolerance * predicted
            else:
                ok = empirical <= 1e-15
        summary.checks.append(Check(name, predicted, empirical, tolerance, ok))

    for col, t in enumerate(overlap_terms):
        if t.shots > 0:
            one_minus_y2 = 1 - y_true[col] ** 2
            if one_minus_y2 <= DETERMINISTIC_TOL:
                one_minus_y2 = 0.0
            check(f"var(y[{format_bitstring(t.label, H.n_qubits)}])", one_minus_y2 / t.shots, var(y_hat[:, col]))
    if m_prime > 0:
        check("var(H22)", h22_predicted, var(h22_hat))
    if sampling == "joint":
        # first-order prediction with the covariance-aware H22 variance
        h22_term = next(t for t in plan.terms if t.label == H22_LABEL)
        predicted = sum(t.variance() for t in overlap_terms if t.cost > 0)
        predicted += h22_term.sensitivity**2 * h22_predicted
        check("var(lambda) first-order", predicted, var(lam))
    else:
        check("var(lambda) vs K/M", plan.continuum_variance, var(lam))
    return summary
