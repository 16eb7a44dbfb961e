"""Measurement-cost engine for single-determinant boosting.

Everything here reduces to one pattern: an estimator whose variance is
``sum_j a_j^2 sigma_j^2 / M_j``. With ``sum_j M_j = M`` fixed the best split
is ``M_j ~ |a_j| sigma_j`` and the variance becomes ``K / M`` with
``K = (sum_j |a_j| sigma_j)^2``. The boosted estimator has one such term per
overlap ``y_j`` plus one for ``H_22``; conventional VQE has one per
measurement group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pauli import PauliSum, PauliTerm
from .statevec import Statevector, term_variance

H22_LABEL = "H22"


@dataclass(frozen=True)
class VarianceTerm:
    """One independently measured quantity: sensitivity, per-shot variance, shots."""

    label: object
    sensitivity: float
    sigma_sq: float
    shots: int = 0

    def __post_init__(self):
        if self.sigma_sq < 0:
            raise ValueError(f"negative per-shot variance for {self.label!r}")

    @property
    def weight(self) -> float:
        return abs(self.sensitivity) * math.sqrt(self.sigma_sq)

    @property
    def cost(self) -> float:
        return self.sensitivity**2 * self.sigma_sq

    def variance(self, shots: float | None = None) -> float:
        m = self.shots if shots is None else shots
        if self.cost == 0:
            return 0.0
        return math.inf if m <= 0 else self.cost / m


@dataclass(frozen=True)
class KFactors:
    k_hf: float
    k_vqe: float
    k_prime: float
    alpha: float
    energy: float

    def __post_init__(self):
        if min(self.k_hf, self.k_vqe, self.k_prime) < 0:
            raise ValueError("K-factors are non-negative")


@dataclass(frozen=True)
class ShotPlan:
    terms: tuple[VarianceTerm, ...]
    total_shots: int
    continuum_variance: float
    achieved_variance: float
    epsilon: float | None = None

    @property
    def k_factor(self) -> float:
        return self.continuum_variance * self.total_shots

    def shots_for(self, label) -> int:
        for t in self.terms:
            if t.label == label:
                return t.shots
        raise KeyError(label)

    def allocations(self) -> dict:
        return {t.label: t.shots for t in self.terms}


# ---------------------------------------------------------------------------
# Variance formulas


def overlap_variance(y: float, shots: int) -> float:
    """Variance ``(1 - y^2) / M`` of the Hadamard-test overlap estimate."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    if abs(y) > 1 + 1e-12:
        raise ValueError("overlap must lie in [-1, 1]")
    return max(0.0, 1.0 - y * y) / shots


def _weights(alpha: float) -> tuple[float, float]:
    a = abs(alpha)
    return a, math.sqrt(max(0.0, 1.0 - a * a))


def _shifted(cross_elements: Mapping[int, complex], energy: float, i0: int, j: int) -> float:
    return complex(cross_elements.get(j, 0.0)).real - (energy if j == i0 else 0.0)


def propagate_eigenvalue_variance(
    alpha: float,
    energy: float,
    cross_elements: Mapping[int, complex],
    overlap_vars: Mapping[int, float],
    var_h22: float,
    i0: int,
) -> float:
    """First-order variance of the two-state eigenvalue estimate.

    ``4 v1^2 v2^2 sum_j (<j|H|i0> - E delta_{j,i0})^2 Var(y_j) + v2^4 Var(H22)``
    with ``v1 = alpha`` and ``v2 = sqrt(1 - alpha^2)``. Overlaps missing
    from ``overlap_vars`` count as known exactly.
    """
    v1, v2 = _weights(alpha)
    if v2 == 0.0:
        return 0.0
    s = sum(_shifted(cross_elements, energy, i0, j) ** 2 * var for j, var in overlap_vars.items())
    return 4 * v1 * v1 * v2 * v2 * s + v2**4 * var_h22


def hf_variance_terms(
    alpha: float,
    energy: float,
    cross_elements: Mapping[int, complex],
    overlaps: Mapping[int, float],
    k_prime: float,
    i0: int,
) -> list[VarianceTerm]:
    """Decompose the boosted estimator into allocatable terms.

    One term per overlap ``y_j`` (label ``j``, sensitivity
    ``2 v1 v2 (<j|H|i0> - E delta)``, per-shot variance ``1 - y_j^2``) and a
    final ``"H22"`` term (sensitivity ``v2^2``, per-shot variance ``K'``).
    """
    v1, v2 = _weights(alpha)
    keys = list(overlaps)
    if i0 not in overlaps:
        raise KeyError("overlaps must include the reference state i0")
    missing = [j for j in cross_elements if j not in overlaps]
    if missing:
        raise KeyError(f"no overlap supplied for coupled states {missing[:5]}")
    terms = [
        VarianceTerm(j, 2 * v1 * v2 * _shifted(cross_elements, energy, i0, j), max(0.0, 1.0 - overlaps[j] ** 2))
        for j in keys
    ]
    terms.append(VarianceTerm(H22_LABEL, v2 * v2, k_prime))
    return terms


def k_factor_hf_vqe(
    alpha: float,
    energy: float,
    cross_elements: Mapping[int, complex],
    overlaps: Mapping[int, float],
    k_prime: float,
    i0: int,
) -> float:
    """``K`` such that ``Var(E) = K / M`` for optimally allocated boosting.

    ``K = (2 a sqrt(1-a^2) sum_j |<j|H|i0> - E delta| sqrt(1-y_j^2)
    + (1-a^2) sqrt(K'))^2``, summed over the states in ``overlaps`` (which
    must cover every state coupled to ``i0``, and ``i0`` itself).
    """
    v1, v2 = _weights(alpha)
    if i0 not in overlaps:
        raise KeyError("overlaps must include the reference state i0")
    total = sum(
        abs(_shifted(cross_elements, energy, i0, j)) * math.sqrt(max(0.0, 1.0 - y * y))
        for j, y in overlaps.items()
    )
    return (2 * v1 * v2 * total + v2 * v2 * math.sqrt(k_prime)) ** 2


def group_sigmas(H: PauliSum, psi: Statevector, groups: Sequence[Sequence[int]] | None = None) -> list[float]:
    """Per-shot standard deviation of each group's energy contribution.

    Covariances between terms sharing a group are neglected, so a group's
    variance is ``sum_i h_i^2 Var(P_i)``. ``groups=None`` measures every
    non-identity term on its own.
    """
    if groups is None:
        groups = [[k] for k, t in enumerate(H.terms) if not t.is_identity]
    sigmas = []
    for g in groups:
        var = 0.0
        for k in g:
            t = H.terms[k]
            if t.is_identity:
                continue
            var += abs(t.coefficient) ** 2 * term_variance(PauliTerm(t.x_mask, t.z_mask), psi)
        sigmas.append(math.sqrt(var))
    return sigmas


def k_factor_conventional_vqe(H: PauliSum, psi: Statevector, groups: Sequence[Sequence[int]] | None = None) -> float:
    """``K_VQE = (sum_g sigma_g)^2`` for grouped Pauli measurement of ``<psi|H|psi>``."""
    return float(sum(group_sigmas(H, psi, groups)) ** 2)


def k_prime_for_h22(H: PauliSum, phi_q: Statevector, groups: Sequence[Sequence[int]] | None = None) -> float:
    """``K'`` for estimating ``H_22 = <phi_q|H|phi_q>`` the conventional way."""
    return k_factor_conventional_vqe(H, phi_q, groups)


# ---------------------------------------------------------------------------
# Allocation


def optimal_allocation(terms: Iterable[VarianceTerm], total_shots: int, epsilon: float | None = None) -> ShotPlan:
    """Split ``total_shots`` across ``terms`` to minimize the summed variance.

    The continuum optimum gives term ``j`` a share ``|a_j| sigma_j / W`` with
    ``W = sum |a| sigma``, for a variance of ``W^2 / N``. Integer shots start
    from largest-remainder rounding of those shares and are then polished by
    single-shot transfers until none lowers the variance; for this separable
    convex objective that is the integer optimum. Terms with zero weight get
    no shots.

    Raises:
        ValueError: no term has positive weight, or ``total_shots`` is
            smaller than the number of terms that need measuring.
    """
    terms = list(terms)
    w = np.array([t.weight for t in terms])
    live = w > 0
    n_live = int(live.sum())
    if n_live == 0:
        raise ValueError("at least one term needs a nonzero |a| sigma")
    if total_shots < n_live:
        raise ValueError(f"{total_shots} shots cannot cover {n_live} observables")
    W = float(w.sum())
    ideal = total_shots * w / W
    shots = np.floor(ideal).astype(np.int64)
    short = total_shots - int(shots.sum())
    if short:
        order = np.argsort(-(ideal - shots), kind="stable")
        shots[order[:short]] += 1

    cost = w**2
    _polish(shots, cost, live)

    planned = tuple(replace(t, shots=int(m)) for t, m in zip(terms, shots))
    achieved = float(sum(t.variance() for t in planned))
    return ShotPlan(planned, int(total_shots), W * W / total_shots, achieved, epsilon)


def _polish(shots: np.ndarray, cost: np.ndarray, live: np.ndarray) -> None:
    idx = np.flatnonzero(live)
    c = cost[idx]
    for _ in range(10 * int(shots.sum()) + 10):
        m = shots[idx].astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(m > 0, c / m - c / (m + 1), np.inf)
            loss = np.where(m > 1, c / (m - 1) - c / m, np.inf)
        j = int(np.argmax(gain))
        loss_ex = loss.copy()
        loss_ex[j] = np.inf
        k = int(np.argmin(loss_ex))
        if not (gain[j] > loss_ex[k] * (1 + 1e-12)):
            break
        shots[idx[j]] += 1
        shots[idx[k]] -= 1
    # Zero-weight terms may have picked up remainder shots; hand them to live terms.
    dead = np.flatnonzero(~live & (shots > 0))
    if dead.size:
        spare = int(shots[dead].sum())
        shots[dead] = 0
        for _ in range(spare):
            m = shots[idx].astype(float)
            j = int(np.argmax(c / m - c / (m + 1)))
            shots[idx[j]] += 1


def shots_for_precision(k: float, epsilon: float) -> int:
    """Smallest ``M`` with ``K / M <= epsilon^2``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if k < 0:
        raise ValueError("K must be non-negative")
    x = k / (epsilon * epsilon)
    # absorb the last-ulp error in epsilon**2 (1 / 1e-3**2 = 999999.9999999998)
    return int(math.ceil(x * (1 - 1e-12))) if x > 0 else 0


# ---------------------------------------------------------------------------
# Speedup


def speedup(k_vqe: float, k_hf: float) -> float:
    """Measurement ratio ``K_VQE / K``; ``inf`` when boosting is exact."""
    if k_hf < 0 or k_vqe < 0:
        raise ValueError("K-factors are non-negative")
    if k_hf == 0:
        return math.inf
    return k_vqe / k_hf


def asymptotic_speedup(alpha: float) -> float:
    """Large-basis limit ``1 / (1 - alpha^2)^2``."""
    if abs(alpha) >= 1:
        raise ValueError("asymptotic speedup diverges at |alpha| = 1")
    return 1.0 / (1.0 - alpha * alpha) ** 2


def asymptotic_ratio(exact_speedup: float, alpha: float) -> float:
    """``S * (1 - alpha^2)^2``: 1 when the exact speedup matches the limit."""
    if abs(alpha) >= 1:
        raise ValueError("ratio undefined at |alpha| = 1")
    return exact_speedup * (1.0 - alpha * alpha) ** 2


def bounded_speedup(
    alpha: float,
    energy: float,
    cross_elements: Mapping[int, complex],
    h_one_norm: float,
    i0: int,
) -> float:
    """Speedup with every per-shot variance replaced by its upper bound of 1.

    ``1/sqrt(S) = 2 a sqrt(1-a^2) sum_j |<j|H|i0> - E delta| / sum|h| + (1 - a^2)``.
    This is the intermediate step towards :func:`asymptotic_speedup`; it is
    never used in place of the exact K-factors.
    """
    v1, v2 = _weights(alpha)
    if h_one_norm <= 0:
        raise ValueError("Hamiltonian one-norm must be positive")
    keys = set(cross_elements) | {i0}
    coupling = sum(abs(_shifted(cross_elements, energy, i0, j)) for j in keys)
    inv_root = 2 * v1 * v2 * coupling / h_one_norm + v2 * v2
    return math.inf if inv_root == 0 else inv_root**-2
