"""Tiny s-orbital RHF + Jordan-Wigner generator for hydrogen fixtures.

Fixture tooling only; the cbvqe package consumes the resulting qubit
Hamiltonians and never touches integrals. Hydrogen basis sets without
polarization functions are pure s shells, so closed-form Gaussian integrals
with the zeroth Boys function are enough.

Spin orbitals are interleaved (qubit 2p = spatial orbital p alpha, 2p+1 =
beta) and occupied orbitals come first, so the Hartree-Fock determinant is
the basis state with the lowest n_electrons qubits set.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np
from scipy.special import erf

BOHR_PER_ANGSTROM = 1.8897259886

# (exponents, contraction coefficients) per shell
BASIS_H = {
    "sto-3g": [
        ([3.42525091, 0.62391373, 0.16885540], [0.15432897, 0.53532814, 0.44463454]),
    ],
    "6-31g": [
        ([18.7311370, 2.8253937, 0.6401217], [0.03349460, 0.23472695, 0.81375733]),
        ([0.1612778], [1.0]),
    ],
    "6-311g": [
        ([33.8650000, 5.0947900, 1.1587900], [0.0254938, 0.1903730, 0.8521610]),
        ([0.3258400], [1.0]),
        ([0.1027410], [1.0]),
    ],
}


def _boys0(t):
    t = np.asarray(t, dtype=float)
    small = t < 1e-12
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 - t / 3.0, 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe)))


def _shells(coords, basis):
    shells = []
    for center in coords:
        for exps, coefs in BASIS_H[basis]:
            a = np.array(exps)
            d = np.array(coefs) * (2 * a / np.pi) ** 0.75
            # renormalize the contraction
            s = sum(di * dj * (np.pi / (ai + aj)) ** 1.5 for ai, di in zip(a, d) for aj, dj in zip(a, d))
            shells.append((np.array(center, float), a, d / math.sqrt(s)))
    return shells


def one_electron(shells, coords, charges):
    n = len(shells)
    S, T, V = np.zeros((n, n)), np.zeros((n, n)), np.zeros((n, n))
    for i, (A, a, da) in enumerate(shells):
        for j, (B, b, db) in enumerate(shells):
            ab2 = float(np.sum((A - B) ** 2))
            for ai, di in zip(a, da):
                for bj, dj in zip(b, db):
                    p = ai + bj
                    mu = ai * bj / p
                    s = (np.pi / p) ** 1.5 * math.exp(-mu * ab2)
                    S[i, j] += di * dj * s
                    T[i, j] += di * dj * mu * (3 - 2 * mu * ab2) * s
                    P = (ai * A + bj * B) / p
                    for C, Z in zip(coords, charges):
                        pc2 = float(np.sum((P - np.array(C)) ** 2))
                        V[i, j] -= di * dj * Z * 2 * np.pi / p * math.exp(-mu * ab2) * float(_boys0(p * pc2))
    return S, T + V


def two_electron(shells):
    n = len(shells)
    eri = np.zeros((n, n, n, n))
    for i, j, k, l in product(range(n), repeat=4):
        if eri[i, j, k, l] != 0:
            continue
        A, a, da = shells[i]
        B, b, db = shells[j]
        C, c, dc = shells[k]
        D, d, dd = shells[l]
        ab2, cd2 = float(np.sum((A - B) ** 2)), float(np.sum((C - D) ** 2))
        val = 0.0
        for ai, di in zip(a, da):
            for bj, dj in zip(b, db):
                p = ai + bj
                P = (ai * A + bj * B) / p
                eab = math.exp(-ai * bj / p * ab2)
                for ck, dk in zip(c, dc):
                    for dl, dl_ in zip(d, dd):
                        q = ck + dl
                        Q = (ck * C + dl * D) / q
                        ecd = math.exp(-ck * dl / q * cd2)
                        pq2 = float(np.sum((P - Q) ** 2))
                        val += (
                            di * dj * dk * dl_
                            * 2 * np.pi**2.5 / (p * q * math.sqrt(p + q))
                            * eab * ecd * float(_boys0(p * q / (p + q) * pq2))
                        )
        for idx in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                    (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
            eri[idx] = val
    return eri


def rhf(S, h, eri, n_occ, max_iter=200, tol=1e-12):
    s_val, s_vec = np.linalg.eigh(S)
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T
    D = np.zeros_like(S)
    energy = 0.0
    for _ in range(max_iter):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = h + 2 * J - K
        e, Cp = np.linalg.eigh(X.T @ F @ X)
        C = X @ Cp
        D_new = C[:, :n_occ] @ C[:, :n_occ].T
        new_energy = float(np.sum(D_new * (h + F)))
        if abs(new_energy - energy) < tol and np.abs(D_new - D).max() < 1e-10:
            D = D_new
            energy = new_energy
            break
        D, energy = D_new, new_energy
    else:
        raise RuntimeError("SCF did not converge")
    return C, e, energy


def _ladder(p: int, dagger: bool):
    """a_p or a_p^dagger as [(coef, x_mask, z_mask)] in X^x Z^z form."""
    below = (1 << p) - 1
    bit = 1 << p
    sign = 1.0 if dagger else -1.0
    return [(0.5, bit, below), (0.5 * sign, bit, below | bit)]


def _multiply(a, b):
    out = {}
    for ca, xa, za in a:
        for cb, xb, zb in b:
            # Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za
            sgn = -1.0 if bin(za & xb).count("1") & 1 else 1.0
            key = (xa ^ xb, za ^ zb)
            out[key] = out.get(key, 0.0) + ca * cb * sgn
    return [(c, x, z) for (x, z), c in out.items() if c != 0]


def qubit_hamiltonian(h_mo, eri_mo, e_nuc, tol=1e-10):
    """Jordan-Wigner encode sum h a+a + 1/2 sum (pq|rs) a+_p a+_r a_s a_q."""
    n_orb = h_mo.shape[0]
    n_so = 2 * n_orb
    acc: dict[tuple[int, int], complex] = {(0, 0): e_nuc}

    def add(coef, ops):
        prod = [(1.0, 0, 0)]
        for p, dag in ops:
            prod = _multiply(prod, _ladder(p, dag))
        for c, x, z in prod:
            acc[(x, z)] = acc.get((x, z), 0.0) + coef * c

    for p, q in product(range(n_so), repeat=2):
        if p % 2 == q % 2 and abs(h_mo[p // 2, q // 2]) > tol:
            add(h_mo[p // 2, q // 2], [(p, True), (q, False)])
    for p, q, r, s in product(range(n_so), repeat=4):
        if p % 2 != q % 2 or r % 2 != s % 2 or p == r:
            continue
        v = eri_mo[p // 2, q // 2, r // 2, s // 2]
        if abs(v) > tol:
            add(0.5 * v, [(p, True), (r, True), (s, False), (q, False)])

    terms = []
    for (x, z), c in acc.items():
        c = c * (-1j) ** bin(x & z).count("1")  # X^x Z^z -> Y-form Pauli string
        if abs(c) <= tol:
            continue
        if abs(c.imag) > 1e-9:
            raise RuntimeError("non-Hermitian qubit Hamiltonian")
        tokens = []
        for qb in range(n_so):
            xb, zb = (x >> qb) & 1, (z >> qb) & 1
            if xb or zb:
                tokens.append("_XZY"[xb | (zb << 1)] + str(qb))
        terms.append((" ".join(tokens), float(c.real)))
    terms.sort(key=lambda t: (len(t[0].split()), t[0]))
    return n_so, terms


def hydrogen_chain(n_atoms: int, spacing_angstrom: float, basis: str):
    coords = [(0.0, 0.0, k * spacing_angstrom * BOHR_PER_ANGSTROM) for k in range(n_atoms)]
    charges = [1.0] * n_atoms
    shells = _shells(coords, basis)
    S, h = one_electron(shells, coords, charges)
    eri = two_electron(shells)
    e_nuc = sum(
        charges[i] * charges[j] / math.dist(coords[i], coords[j])
        for i in range(n_atoms) for j in range(i + 1, n_atoms)
    )
    C, _, e_elec = rhf(S, h, eri, n_atoms // 2)
    h_mo = C.T @ h @ C
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri, optimize=True)
    n_so, terms = qubit_hamiltonian(h_mo, eri_mo, e_nuc)
    return n_so, terms, e_elec + e_nuc
