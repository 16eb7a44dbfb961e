"""Subspace matrices, the real generalized eigenproblem, and its sensitivities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DegenerateEigenvalueError, IllConditionedError
from .pauli import PauliSum, connected_matrix_elements
from .statevec import DEGENERACY_GAP, Statevector, expectation

PD_THRESHOLD = 1e-10
MAX_CONDITION = 1e10


@dataclass(frozen=True, eq=False)
class SubspaceProblem:
    """Real symmetric ``h_bar`` and unit-diagonal ``s_bar`` over ``k`` basis states.

    For the two-state problem built by :func:`build_two_state_problem` the
    inputs it was assembled from (``<j|H|i0>`` and ``y_j``) are kept too.
    """

    h_bar: np.ndarray
    s_bar: np.ndarray
    labels: tuple[str, ...] = ()
    i0: int | None = None
    cross_elements: dict = field(default_factory=dict)
    overlaps: dict = field(default_factory=dict)

    def __post_init__(self):
        h = np.array(self.h_bar, dtype=float)
        s = np.array(self.s_bar, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape != s.shape:
            raise ValueError("h_bar and s_bar must be square matrices of equal size")
        scale = max(1.0, float(np.abs(h).max(initial=0.0)))
        if not np.allclose(h, h.T, atol=1e-12 * scale):
            raise ValueError("h_bar is not symmetric")
        if not np.allclose(s, s.T, atol=1e-12):
            raise ValueError("s_bar is not symmetric")
        if not np.allclose(np.diag(s), 1.0, atol=1e-12):
            raise ValueError("s_bar must have a unit diagonal")
        smallest = float(np.linalg.eigvalsh(s)[0])
        if smallest <= PD_THRESHOLD:
            raise IllConditionedError(
                f"overlap matrix is not positive definite (smallest eigenvalue {smallest:.3e})"
            )
        h.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "h_bar", h)
        object.__setattr__(self, "s_bar", s)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"state{k}" for k in range(h.shape[0])))

    @property
    def dim(self) -> int:
        return self.h_bar.shape[0]


@dataclass(frozen=True, eq=False)
class GevpSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, normalized to v^T S v = 1
    problem: SubspaceProblem

    @property
    def gap(self) -> float:
        if self.eigenvalues.size < 2:
            return float("inf")
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    def residuals(self) -> np.ndarray:
        H, S = self.problem.h_bar, self.problem.s_bar
        V, lam = self.eigenvectors, self.eigenvalues
        return np.linalg.norm(H @ V - (S @ V) * lam, axis=0)


def build_two_state_problem(H: PauliSum, i0: int, phi_q: Statevector) -> SubspaceProblem:
    """Assemble ``H_bar`` and ``S_bar`` for ``span{|i0>, |phi_q>}``.

    ``H_11`` is read off directly, ``H_22`` is the expectation in
    ``phi_q``, and the cross term is ``sum_j y_j <j|H|i0>`` with
    ``y_j = Re(<phi_q|j>)`` over the states ``H`` couples to ``i0``. The
    off-diagonal overlap is ``y_{i0}``. Matrix elements are taken real, which
    is exact for Hamiltonians with real matrices.
    """
    if not np.isclose(phi_q.norm(), 1.0, atol=1e-10):
        raise ValueError("phi_q must be normalized")
    cross = connected_matrix_elements(H, i0)
    support = [i0] + [j for j in cross if j != i0]
    y = {j: float(phi_q.amplitudes[j].real) for j in support}
    h11 = float(complex(cross.get(i0, 0.0)).real)
    h22 = expectation(H, phi_q)
    h12 = float(sum(y[j] * complex(v).real for j, v in cross.items()))
    s12 = y[i0]
    return SubspaceProblem(
        h_bar=np.array([[h11, h12], [h12, h22]]),
        s_bar=np.array([[1.0, s12], [s12, 1.0]]),
        labels=("classical", "quantum"),
        i0=i0,
        cross_elements=cross,
        overlaps=y,
    )


def solve_real_gevp(p: SubspaceProblem) -> GevpSolution:
    """All eigenpairs of ``H v = lambda S v``, ascending.

    Eigenvectors satisfy ``v^T S v = 1`` and have their first nonzero
    component made non-negative.
    """
    cond = np.linalg.cond(p.s_bar)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(f"overlap matrix condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}")
    vals, vecs = scipy.linalg.eigh(p.h_bar, p.s_bar)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-14 * np.abs(col).max())
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return GevpSolution(vals, vecs, p)


def eigen_sensitivities(sol: GevpSolution, which: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of eigenvalue ``which`` w.r.t. the entries of ``H`` and ``S``.

    Off-diagonal entries are treated as one symmetric parameter (both
    ``(a, b)`` and ``(b, a)`` move together), hence the factor 2 off the
    diagonal: ``dl/dH_ab = v_a v_b (2 - delta_ab)`` and
    ``dl/dS_ab = -lambda dl/dH_ab``.

    Raises:
        DegenerateEigenvalueError: if another eigenvalue lies within 1e-9.
    """
    lam = sol.eigenvalues
    others = np.delete(lam, which)
    if others.size and np.min(np.abs(others - lam[which])) < DEGENERACY_GAP:
        raise DegenerateEigenvalueError(f"eigenvalue {which} is degenerate")
    v = sol.eigenvectors[:, which]
    k = v.size
    d_h = np.outer(v, v) * (2.0 - np.eye(k))
    return d_h, -lam[which] * d_h


def rayleigh_quotient(h_bar, s_bar, w) -> float:
    """``w^T Re(H) w / w^T Re(S) w`` for a real vector ``w``."""
    w = np.asarray(w, dtype=float)
    den = float(w @ np.real(s_bar) @ w)
    if den <= 0:
        raise ValueError("w^T S w must be positive")
    return float(w @ np.real(h_bar) @ w) / den


class UpperBoundCheck(NamedTuple):
    lambda_complex: float
    lambda_real: float
    holds: bool


def verify_upper_bound(h_complex, s_complex, atol: float = 1e-12) -> UpperBoundCheck:
    """Compare the lowest eigenvalue with and without imaginary parts."""
    h = np.asarray(h_complex, dtype=complex)
    s = np.asarray(s_complex, dtype=complex)
    lam_c = float(scipy.linalg.eigh(h, s, eigvals_only=True, subset_by_index=[0, 0])[0])
    lam_r = float(scipy.linalg.eigh(h.real, s.real, eigvals_only=True, subset_by_index=[0, 0])[0])
    return UpperBoundCheck(lam_c, lam_r, lam_c <= lam_r + atol * max(1.0, abs(lam_r)))


def congruence(h_bar: np.ndarray, s_bar: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(M^T H M, M^T S M)`` rescaled back to a unit-diagonal ``S``.

    The rescaling is itself a congruence, so for invertible ``M`` the
    generalized eigenvalues are unchanged.
    """
    h, s = m.T @ h_bar @ m, m.T @ s_bar @ m
    d = 1.0 / np.sqrt(np.diag(s))
    h, s = h * np.outer(d, d), s * np.outer(d, d)
    return (h + h.T) / 2, (s + s.T) / 2

