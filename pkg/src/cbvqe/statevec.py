"""Dense statevector engine.

Supplies the exact ground state used as the analysis oracle, expectation
values and single-term variances, the overlaps ``Re(<psi|i>)``, deflation of
the ground state against a reference determinant, and a particle-number
conserving brick-layer ansatz for the controlled-gate cost model.

Hamiltonians are applied matrix-free: terms are bucketed by ``x_mask`` and
each bucket becomes a diagonal phase vector followed by an index permutation
``i -> i ^ x_mask``.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import ConvergenceError, DegenerateEigenvalueError, DimensionError
from .pauli import PauliSum, PauliTerm, popcount

logger = logging.getLogger(__name__)

MAX_QUBITS_ENV = "CBVQE_MAX_QUBITS"
DEFAULT_MAX_QUBITS = 20
# Dense eigh of a 4096x4096 matrix already costs ~10 s on one core.
DENSE_MAX_QUBITS = 10
DEGENERACY_GAP = 1e-9
CLASSICAL_TOL = 1e-12


def max_qubits() -> int:
    value = os.environ.get(MAX_QUBITS_ENV)
    if value is None:
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(value)
    except ValueError:
        raise DimensionError(f"{MAX_QUBITS_ENV} must be an integer, got {value!r}") from None
    if cap < 1:
        raise DimensionError(f"{MAX_QUBITS_ENV} must be positive")
    return cap


@dataclass(frozen=True, eq=False)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise DimensionError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_array(cls, amplitudes, normalize: bool = False) -> "Statevector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(amps.size).bit_length() - 1
        if amps.ndim != 1 or (1 << n) != amps.size:
            raise DimensionError("amplitude vector length must be a power of two")
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / nrm
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    state: Statevector
    degenerate: bool
    gap: float
    residual: float
    method: str


def basis_statevector(i: int, n_qubits: int) -> Statevector:
    if not 0 <= i < (1 << n_qubits):
        raise DimensionError(f"basis index {i} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[i] = 1.0
    return Statevector(n_qubits, amps)


# ---------------------------------------------------------------------------
# Matrix-free Hamiltonian action


@lru_cache(maxsize=64)
def _basis_indices(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.uint64)
    idx.setflags(write=False)
    return idx


def _parity_signs(z_mask: int, n_qubits: int) -> np.ndarray:
    idx = _basis_indices(n_qubits)
    odd = np.bitwise_count(idx & np.uint64(z_mask)) & np.uint8(1)
    return 1.0 - 2.0 * odd


def _buckets(H: PauliSum) -> dict[int, list[tuple[int, complex]]]:
    buckets: dict[int, list[tuple[int, complex]]] = {}
    for t in H.terms:
        buckets.setdefault(t.x_mask, []).append((t.z_mask, t.coefficient * 1j ** (t.n_y % 4)))
    return buckets


def is_real_hamiltonian(H: PauliSum) -> bool:
    """True when every matrix element of ``H`` is real."""
    return all(t.n_y % 2 == 0 and complex(t.coefficient).imag == 0 for t in H.terms)


class _HamiltonianAction:
    """Callable ``psi -> H psi`` with per-bucket diagonals precomputed."""

    def __init__(self, H: PauliSum):
        self.n_qubits = H.n_qubits
        self.real = is_real_hamiltonian(H)
        dtype = float if self.real else complex
        idx = _basis_indices(H.n_qubits)
        self.parts = []
        for x_mask, entries in _buckets(H).items():
            diag = np.zeros(idx.size, dtype=dtype)
            for z_mask, c in entries:
                diag += (c.real if self.real else c) * _parity_signs(z_mask, H.n_qubits)
            perm = None if x_mask == 0 else (idx ^ np.uint64(x_mask)).astype(np.intp)
            self.parts.append((diag, perm))

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        out = np.zeros(psi.shape, dtype=np.result_type(psi.dtype, self.parts[0][0].dtype) if self.parts else psi.dtype)
        for diag, perm in self.parts:
            v = diag * psi if psi.ndim == 1 else diag[:, None] * psi
            # (H psi)[i ^ x] += d[i] psi[i]  <=>  out += v[perm] since perm is an involution
            out += v if perm is None else v[perm]
        return out


def apply_hamiltonian(H: PauliSum, psi: Statevector | np.ndarray) -> np.ndarray:
    amps = psi.amplitudes if isinstance(psi, Statevector) else np.asarray(psi)
    if amps.shape[0] != 1 << H.n_qubits:
        raise DimensionError("state and Hamiltonian disagree on qubit count")
    return _HamiltonianAction(H)(amps)


def hamiltonian_matrix(H: PauliSum) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of ``H`` (real dtype when possible)."""
    action = _HamiltonianAction(H)
    dim = 1 << H.n_qubits
    dtype = float if action.real else complex
    mat = np.zeros((dim, dim), dtype=dtype)
    cols = np.arange(dim)
    for diag, perm in action.parts:
        rows = cols if perm is None else perm
        mat[rows, cols] += diag
    return mat


# ---------------------------------------------------------------------------
# Ground state


def _fix_phase_by_largest(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > np.abs(vec).max() * (1 - 1e-9)))
    return vec * (abs(vec[k]) / vec[k])


def exact_ground_state(
    H: PauliSum,
    *,
    dense_max_qubits: int = DENSE_MAX_QUBITS,
    qubit_cap: int | None = None,
) -> GroundStateResult:
    """Lowest eigenpair of ``H``, with a flag for a degenerate ground level.

    Systems up to ``dense_max_qubits`` are diagonalized densely; larger ones
    use Lanczos (ARPACK) on the matrix-free action. The returned state has
    its largest amplitude made real and positive.

    Raises:
        DimensionError: ``H.n_qubits`` above the cap (``CBVQE_MAX_QUBITS``).
        ConvergenceError: the iterative solver fails or the residual check
            ``||H psi - E psi|| <= 1e-8 * sum|h|`` does not hold.
    """
    cap = max_qubits() if qubit_cap is None else qubit_cap
    if H.n_qubits > cap:
        raise DimensionError(f"{H.n_qubits} qubits exceeds the cap of {cap}")
    H.require_hermitian()
    n = H.n_qubits

    if n <= dense_max_qubits or n <= 2:
        mat = hamiltonian_matrix(H)
        vals, vecs = scipy.linalg.eigh(mat, subset_by_index=[0, min(1, mat.shape[0] - 1)])
        method = "dense"
    else:
        action = _HamiltonianAction(H)
        dim = 1 << n
        dtype = float if action.real else complex
        op = LinearOperator((dim, dim), matvec=action, dtype=dtype)
        v0 = np.random.default_rng(12345).standard_normal(dim).astype(dtype)
        try:
            vals, vecs = eigsh(op, k=2, which="SA", v0=v0, tol=1e-13, maxiter=50 * dim)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos did not converge: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        method = "lanczos"

    energy = float(vals[0])
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else float("inf")
    vec = _fix_phase_by_largest(vecs[:, 0].astype(complex))
    vec /= np.linalg.norm(vec)

    residual = float(np.linalg.norm(apply_hamiltonian(H, vec) - energy * vec))
    scale = max(sum(abs(t.coefficient) for t in H.terms), 1e-300)
    if residual > 1e-8 * scale:
        raise ConvergenceError(f"ground-state residual {residual:.3e} exceeds 1e-8 * {scale:.3e}")
    degenerate = gap < DEGENERACY_GAP
    if degenerate:
        logger.warning("ground state of %s is degenerate (gap %.3e)", H.label or "Hamiltonian", gap)
    return GroundStateResult(energy, Statevector(n, vec), degenerate, gap, residual, method)


def require_nondegenerate(result: GroundStateResult) -> None:
    if result.degenerate:
        raise DegenerateEigenvalueError(f"ground state is degenerate (gap {result.gap:.3e} < {DEGENERACY_GAP})")


# ---------------------------------------------------------------------------
# Expectations, variances, overlaps


def _check_dims(H: PauliSum, psi: Statevector) -> None:
    if psi.n_qubits != H.n_qubits:
        raise DimensionError(f"state has {psi.n_qubits} qubits, operator has {H.n_qubits}")


def expectation(H: PauliSum, psi: Statevector) -> float:
    _check_dims(H, psi)
    return float(np.vdot(psi.amplitudes, apply_hamiltonian(H, psi)).real)


def pauli_expectation(P: PauliTerm, psi: Statevector) -> float:
    """``<psi|P|psi>`` for the bare Pauli string (coefficient ignored)."""
    amps = psi.amplitudes
    idx = _basis_indices(psi.n_qubits)
    signs = _parity_signs(P.z_mask, psi.n_qubits) * (1j ** (P.n_y % 4))
    flipped = (idx ^ np.uint64(P.x_mask)).astype(np.intp)
    return float(np.vdot(amps[flipped], signs * amps).real)


def term_variance(P: PauliTerm, psi: Statevector) -> float:
    """Single-shot variance ``1 - <P>^2`` of a unit-weight Pauli string."""
    if not np.isclose(abs(P.coefficient), 1.0):
        raise ValueError("term_variance expects a unit-magnitude coefficient")
    e = pauli_expectation(P, psi)
    return float(min(1.0, max(0.0, 1.0 - e * e)))


def overlaps_with_basis(psi: Statevector, support=None, atol: float = 0.0) -> dict[int, float]:
    """Map basis index ``i`` to ``y_i = Re(<psi|i>)``.

    With ``support`` given, only those indices are returned (zeros included);
    otherwise every index with ``|y_i| > atol``.
    """
    y = psi.amplitudes.real  # Re(conj(a)) == Re(a)
    if support is not None:
        return {int(i): float(y[i]) for i in support}
    return {int(i): float(y[i]) for i in np.flatnonzero(np.abs(y) > atol)}


def fix_global_phase(psi: Statevector, i0: int) -> Statevector:
    """Rotate ``psi`` so that ``<i0|psi>`` is real and non-negative."""
    a = psi.amplitudes[i0]
    if abs(a) == 0:
        return psi
    return Statevector(psi.n_qubits, psi.amplitudes * (abs(a) / a))


def deflate_quantum_state(gs: Statevector, i0: int) -> tuple[float, Statevector | None]:
    """Split ``gs`` into ``alpha |i0> + sqrt(1 - alpha^2) |phi_q>``.

    The global phase is fixed first so that ``alpha = <i0|gs>`` is real and
    non-negative. When ``gs`` is (numerically) the basis state itself the
    boosted estimate is already exact; that case returns ``(1.0, None)``.
    """
    gs = fix_global_phase(gs, i0)
    alpha = float(gs.amplitudes[i0].real)
    if alpha >= 1.0 - CLASSICAL_TOL:
        return 1.0, None
    rest = gs.amplitudes.copy()
    rest[i0] = 0.0
    rest /= np.linalg.norm(rest)
    return alpha, Statevector(gs.n_qubits, rest)


def select_reference_state(psi: Statevector, n_electrons: int | None = None) -> int:
    """Basis state with the largest ``|<i|psi>|`` in the given electron sector.

    Falls back to the global maximum when the sector is unspecified or holds
    no weight. Ties go to the smallest index.
    """
    weights = np.abs(psi.amplitudes)
    if n_electrons is not None:
        idx = _basis_indices(psi.n_qubits)
        mask = np.bitwise_count(idx) == n_electrons
        if mask.any() and weights[mask].max() > 0:
            weights = np.where(mask, weights, -1.0)
    return int(np.argmax(weights))


def hamming_weight_projection(psi: Statevector, k: int) -> float:
    """Probability that ``psi`` lies in the Hamming-weight-``k`` sector."""
    mask = np.bitwise_count(_basis_indices(psi.n_qubits)) == k
    return float(np.sum(np.abs(psi.amplitudes[mask]) ** 2))


# ---------------------------------------------------------------------------
# Particle-number conserving brick-layer ansatz


def brick_layout(n_qubits: int, layers: int) -> list[tuple[int, int]]:
    """Blocks as ``(layer, q)`` acting on qubits ``(q, q + 1)``.

    Even layers start at qubit 0, odd layers at qubit 1.
    """
    return [(layer, q) for layer in range(layers) for q in range(layer % 2, n_qubits - 1, 2)]


@dataclass(frozen=True, eq=False)
class AnsatzSpec:
    """Initial bitstring followed by ``layers`` brick layers of Givens blocks.

    ``angles`` has one ``(theta, phi)`` row per block in
    :func:`brick_layout` order.
    """

    n_qubits: int
    layers: int
    angles: np.ndarray
    initial_state: int

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("the ansatz needs at least two qubits")
        if self.layers < 0:
            raise ValueError("layers must be non-negative")
        if not 0 <= self.initial_state < (1 << self.n_qubits):
            raise DimensionError("initial state out of range")
        angles = np.asarray(self.angles, dtype=float).reshape(-1, 2)
        expected = len(brick_layout(self.n_qubits, self.layers))
        if angles.shape[0] != expected:
            raise ValueError(f"expected {expected} angle pairs, got {angles.shape[0]}")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @classmethod
    def zeros(cls, n_qubits: int, layers: int, initial_state: int) -> "AnsatzSpec":
        return cls(n_qubits, layers, np.zeros((len(brick_layout(n_qubits, layers)), 2)), initial_state)

    @classmethod
    def random(cls, n_qubits: int, layers: int, initial_state: int, seed: int, real: bool = False) -> "AnsatzSpec":
        rng = np.random.default_rng(seed)
        angles = rng.uniform(-np.pi, np.pi, size=(len(brick_layout(n_qubits, layers)), 2))
        if real:
            angles[:, 1] = 0.0
        return cls(n_qubits, layers, angles, initial_state)

    @property
    def blocks(self) -> list[tuple[int, int]]:
        return brick_layout(self.n_qubits, self.layers)


def _apply_givens(amps: np.ndarray, n_qubits: int, q: int, theta: float, phi: float) -> None:
    idx = _basis_indices(n_qubits)
    lo, hi = np.uint64(1 << q), np.uint64(1 << (q + 1))
    a = np.flatnonzero(((idx & lo) != 0) & ((idx & hi) == 0))
    b = a ^ int(lo | hi)
    c, s = np.cos(theta), np.sin(theta)
    pa, pb = amps[a].copy(), amps[b].copy()
    amps[a] = c * pa - np.exp(-1j * phi) * s * pb
    amps[b] = np.exp(1j * phi) * s * pa + c * pb


def apply_ansatz(spec: AnsatzSpec) -> Statevector:
    """Prepare the initial bitstring and run every block in layout order.

    Each block rotates within ``span{|01>, |10>}`` of its qubit pair and
    leaves ``|00>`` and ``|11>`` alone, so Hamming weight is conserved.
    """
    amps = np.zeros(1 << spec.n_qubits, dtype=complex)
    amps[spec.initial_state] = 1.0
    for (_, q), (theta, phi) in zip(spec.blocks, spec.angles):
        _apply_givens(amps, spec.n_qubits, q, theta, phi)
    return Statevector(spec.n_qubits, amps)


def count_coupling_blocks(spec: AnsatzSpec) -> tuple[int, int]:
    """``(total_blocks, coupling_blocks)`` for a ``|0^{N-k} 1^k>`` start.

    Only blocks on the pair straddling the filled/empty boundary fail to
    leave the reference determinant invariant, so only those need a
    controlled implementation in the overlap circuit.
    """
    k = popcount(spec.initial_state)
    if spec.initial_state != (1 << k) - 1:
        raise ValueError("initial state must fill the lowest k qubits")
    blocks = spec.blocks
    if k == 0 or k == spec.n_qubits:
        return len(blocks), 0
    return len(blocks), sum(1 for _, q in blocks if q == k - 1)
