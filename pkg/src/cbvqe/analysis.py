"""HF-VQE versus conventional VQE measurement-cost analysis for one Hamiltonian."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

from .errors import DegenerateEigenvalueError
from .hadamard import GateCostModel, controlled_overhead
from .pauli import PauliSum, connected_matrix_elements, format_bitstring, greedy_grouping, one_norm
from .shots import (
    KFactors,
    asymptotic_ratio,
    asymptotic_speedup,
    bounded_speedup,
    k_factor_conventional_vqe,
    k_factor_hf_vqe,
    k_prime_for_h22,
    shots_for_precision,
    speedup,
)
from .statevec import (
    DENSE_MAX_QUBITS,
    GroundStateResult,
    Statevector,
    deflate_quantum_state,
    exact_ground_state,
    select_reference_state,
)
from .subspace import GevpSolution, SubspaceProblem, build_two_state_problem, solve_real_gevp

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-3  # Hartree
CONTROL_OVERHEAD_F = 3.0

STATUS_OK = "ok"
STATUS_CLASSICAL = "classically-solved"


@dataclass(frozen=True, eq=False)
class BoostedSetup:
    """Everything derived from the exact ground state that the cost model needs.

    ``phi_q``, ``problem`` and ``solution`` are ``None`` when the reference
    determinant is itself the ground state.
    """

    hamiltonian: PauliSum
    ground: GroundStateResult
    i0: int
    alpha: float
    phi_q: Statevector | None
    groups: list[list[int]]
    cross_elements: dict[int, complex]
    overlaps: dict[int, float]
    problem: SubspaceProblem | None
    solution: GevpSolution | None

    @property
    def energy(self) -> float:
        return self.ground.energy

    @property
    def classically_solved(self) -> bool:
        return self.phi_q is None


def prepare(
    H: PauliSum,
    hf_state: int | None = None,
    *,
    dense_max_qubits: int = DENSE_MAX_QUBITS,
) -> BoostedSetup:
    """Diagonalize ``H``, pick the boosting determinant and deflate against it.

    Raises:
        DegenerateEigenvalueError: the ground level is degenerate.
    """
    gs = exact_ground_state(H, dense_max_qubits=dense_max_qubits)
    if gs.degenerate:
        raise DegenerateEigenvalueError(
            f"{H.label or 'Hamiltonian'}: ground state is degenerate (gap {gs.gap:.3e}); analysis skipped"
        )
    i0 = select_reference_state(gs.state, H.n_electrons) if hf_state is None else hf_state
    if not 0 <= i0 < (1 << H.n_qubits):
        raise ValueError(f"reference state {i0} out of range for {H.n_qubits} qubits")
    alpha, phi_q = deflate_quantum_state(gs.state, i0)
    cross = connected_matrix_elements(H, i0)
    groups = greedy_grouping(H)
    if phi_q is None:
        return BoostedSetup(H, gs, i0, alpha, None, groups, cross, {}, None, None)

    problem = build_two_state_problem(H, i0, phi_q)
    solution = solve_real_gevp(problem)
    drift = abs(solution.eigenvalues[0] - gs.energy)
    if drift > 1e-8:
        logger.warning("%s: subspace eigenvalue misses exact energy by %.3e", H.label, drift)
    return BoostedSetup(H, gs, i0, alpha, phi_q, groups, cross, dict(problem.overlaps), problem, solution)


def k_factors(setup: BoostedSetup) -> KFactors:
    H = setup.hamiltonian
    k_vqe = k_factor_conventional_vqe(H, setup.ground.state, setup.groups)
    if setup.classically_solved:
        return KFactors(0.0, k_vqe, 0.0, setup.alpha, setup.energy)
    k_prime = k_prime_for_h22(H, setup.phi_q, setup.groups)
    k_hf = k_factor_hf_vqe(setup.alpha, setup.energy, setup.cross_elements, setup.overlaps, k_prime, setup.i0)
    return KFactors(k_hf, k_vqe, k_prime, setup.alpha, setup.energy)


@dataclass(frozen=True)
class AnalysisReport:
    label: str
    n_qubits: int
    alpha: float
    E_exact: float
    M_vqe: int
    M_hfvqe: int
    speedup: float
    asymptotic_speedup: float
    asymptotic_ratio: float
    epsilon: float
    hf_state: str
    status: str
    E_subspace: float
    k_vqe: float
    k_prime: float
    k_hf: float
    bounded_speedup: float
    n_terms: int
    n_groups: int
    n_overlaps: int
    controlled_overhead: float
    ground_state_gap: float

    def as_dict(self) -> dict:
        return asdict(self)


CSV_COLUMNS = (
    "label",
    "n_qubits",
    "alpha",
    "E_exact",
    "M_vqe",
    "M_hfvqe",
    "speedup",
    "asymptotic_speedup",
    "asymptotic_ratio",
)


def analyze(
    H: PauliSum,
    epsilon: float = DEFAULT_EPSILON,
    hf_state: int | None = None,
    *,
    dense_max_qubits: int = DENSE_MAX_QUBITS,
) -> AnalysisReport:
    """Measurements needed for precision ``epsilon`` with and without boosting.

    Both costs are evaluated on the exact ground state: conventional VQE
    measures it directly in greedy qubitwise groups, HF-VQE measures the
    deflated state ``phi_q`` plus the overlaps ``y_j``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    setup = prepare(H, hf_state, dense_max_qubits=dense_max_qubits)
    k = k_factors(setup)
    m_vqe = shots_for_precision(k.k_vqe, epsilon)
    m_hf = shots_for_precision(k.k_hf, epsilon)
    s = speedup(k.k_vqe, k.k_hf)
    if setup.classically_solved:
        asym, ratio, bounded, e_sub = math.inf, math.nan, math.inf, setup.energy
    else:
        asym = asymptotic_speedup(setup.alpha)
        ratio = asymptotic_ratio(s, setup.alpha)
        norm = one_norm(H)
        bounded = (
            bounded_speedup(setup.alpha, setup.energy, setup.cross_elements, norm, setup.i0)
            if norm > 0
            else math.nan
        )
        e_sub = float(setup.solution.eigenvalues[0])
    overhead = controlled_overhead(GateCostModel(H.n_qubits, H.n_qubits, CONTROL_OVERHEAD_F)) if H.n_qubits >= 2 else math.nan
    return AnalysisReport(
        label=H.label,
        n_qubits=H.n_qubits,
        alpha=setup.alpha,
        E_exact=setup.energy,
        M_vqe=m_vqe,
        M_hfvqe=m_hf,
        speedup=s,
        asymptotic_speedup=asym,
        asymptotic_ratio=ratio,
        epsilon=epsilon,
        hf_state=format_bitstring(setup.i0, H.n_qubits),
        status=STATUS_CLASSICAL if setup.classically_solved else STATUS_OK,
        E_subspace=e_sub,
        k_vqe=k.k_vqe,
        k_prime=k.k_prime,
        k_hf=k.k_hf,
        bounded_speedup=bounded,
        n_terms=len(H.terms),
        n_groups=len(setup.groups),
        n_overlaps=len(setup.overlaps),
        controlled_overhead=overhead,
        ground_state_gap=setup.ground.gap,
    )
