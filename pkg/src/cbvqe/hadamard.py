"""Hadamard-test outcome model, Bernoulli sampler, and controlled-gate cost.

Only real-part tests are modelled: the ancilla reads ``+`` with probability
``(1 + y) / 2`` where ``y`` is the real part being estimated, and ``y`` is
recovered as ``2 p_hat - 1``. Sampling draws from exact Born probabilities;
there is no gate-level noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .pauli import PauliSum, connected_matrix_elements
from .statevec import Statevector

ObservableKind = Literal["overlap", "hamiltonian-cross-term"]
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class HadamardObservable:
    kind: ObservableKind
    true_value: float
    label: object = None

    def __post_init__(self):
        if self.kind not in ("overlap", "hamiltonian-cross-term"):
            raise ValueError(f"unknown observable kind {self.kind!r}")
        v = float(self.true_value)
        if abs(v) > 1 + _EDGE_TOL:
            raise ValueError(f"Hadamard-test value {v} lies outside [-1, 1]")
        object.__setattr__(self, "true_value", min(1.0, max(-1.0, v)))


@dataclass(frozen=True)
class GateCostModel:
    """Qubits ``n``, brick layers ``depth`` and per-block control overhead ``f``."""

    n: int
    depth: int
    f: float = 3.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two qubits")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.f < 1:
            raise ValueError("control overhead factor must be >= 1")


def outcome_probability(obs: HadamardObservable) -> float:
    """Probability of the ``+`` ancilla outcome."""
    return 0.5 * (1.0 + obs.true_value)


def sample_estimator(obs: HadamardObservable, shots: int, seed: int) -> tuple[float, float]:
    """One run of ``shots`` ancilla measurements; returns ``(y_hat, p_hat)``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = np.random.default_rng(seed)
    successes = int(rng.binomial(shots, outcome_probability(obs)))
    p_hat = successes / shots
    return 2.0 * p_hat - 1.0, p_hat


def sample_estimates(
    true_values: Sequence[float],
    shots: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized Hadamard-test replicas, shape ``(replicas, len(true_values))``.

    Columns with zero shots carry the true value; callers only do that for
    observables whose estimate is not needed.
    """
    y = np.clip(np.asarray(true_values, dtype=float), -1.0, 1.0)
    m = np.asarray(shots, dtype=np.int64)
    p = 0.5 * (1.0 + y)
    counts = rng.binomial(np.broadcast_to(m, (replicas, m.size)), p)
    with np.errstate(invalid="ignore", divide="ignore"):
        est = 2.0 * counts / m - 1.0
    return np.where(m > 0, est, y)


def controlled_overhead(model: GateCostModel) -> float:
    """Two-qubit gate count of the controlled overlap test relative to plain VQE.

    Counts ``depth * n / 2`` blocks, ``depth / 2`` of which are coupling
    blocks costing ``f`` times more when controlled, plus up to ``n``
    controlled Paulis: ``1 + f/n + 2/depth``.
    """
    if model.depth == 0:
        raise ValueError("overhead is undefined for a zero-depth ansatz")
    return 1.0 + model.f / model.n + 2.0 / model.depth


def build_observables(H: PauliSum, i0: int, phi_q: Statevector) -> list[HadamardObservable]:
    """One overlap test per basis state coupled to ``|i0>`` by ``H``, plus ``|i0>``.

    ``label`` is the basis index; ``|i0>`` comes first, the rest follow in
    coupling order.
    """
    support = [i0] + [j for j in connected_matrix_elements(H, i0) if j != i0]
    amps = phi_q.amplitudes
    return [HadamardObservable("overlap", float(amps[j].real), j) for j in support]
