"""Regenerate the bundled Hamiltonian fixtures in src/cbvqe/data/.

Usage: python tools/make_fixtures.py

* synthetic_2q   - hand-written 2-qubit Hamiltonian, real matrix, used by the
                   Monte Carlo checks.
* h2_sto3g_4q    - H2 at 0.7414 A, STO-3G, Jordan-Wigner with interleaved spin
                   orbitals (qubits 0/1 = bonding alpha/beta). Coefficients are
                   the widely reproduced values for this geometry; the identity
                   term includes nuclear repulsion.
* hubbard_4site_8q - open 4-site Hubbard chain, t = 1, U = 4, particle-hole
                   symmetric interaction U (n_up - 1/2)(n_dn - 1/2), qubit 2i
                   is site i spin up and 2i+1 spin down.
* h2_631g_8q, h2_6311g_12q - H2 at 0.7414 A in the 6-31G and 6-311G basis
                   sets (all orbitals active), generated by tools/molecular.py.
* h4_sto3g_8q, h6_sto3g_12q - linear hydrogen chains with 1.0 A spacing in
                   STO-3G, same generator.

tools/molecular.py reproduces the h2_sto3g_4q coefficients to ~1e-8.
"""

from __future__ import annotations

import json
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "cbvqe" / "data"


def write(name: str, n_qubits: int, terms: list[tuple[str, float]], label: str, n_electrons=None, note=""):
    doc = {
        "n_qubits": n_qubits,
        "n_electrons": n_electrons,
        "label": label,
        "provenance": note,
        "terms": [{"pauli": p, "coeff": c} for p, c in terms],
    }
    (DATA / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def synthetic_2q():
    terms = [
        ("", -0.3),
        ("Z0", -0.6),
        ("Z1", -0.4),
        ("X0", 0.25),
        ("X1", 0.2),
        ("Z0 Z1", 0.15),
        ("X0 X1", 0.1),
        ("Y0 Y1", 0.05),
    ]
    write("synthetic_2q", 2, terms, "synthetic-2q", note="hand-written test Hamiltonian")


def h2_sto3g():
    terms = [
        ("", -0.0988639693),
        ("Z0", 0.1711977490),
        ("Z1", 0.1711977490),
        ("Z2", -0.2227859305),
        ("Z3", -0.2227859305),
        ("Z0 Z1", 0.1686221915),
        ("Z0 Z2", 0.1205448220),
        ("Z0 Z3", 0.1658670240),
        ("Z1 Z2", 0.1658670240),
        ("Z1 Z3", 0.1205448220),
        ("Z2 Z3", 0.1743484418),
        ("X0 X1 Y2 Y3", -0.0453222020),
        ("X0 Y1 Y2 X3", 0.0453222020),
        ("Y0 X1 X2 Y3", 0.0453222020),
        ("Y0 Y1 X2 X3", -0.0453222020),
    ]
    write("h2_sto3g_4q", 4, terms, "H2-sto3g", n_electrons=2, note="H2 0.7414 A STO-3G, Jordan-Wigner")


def hubbard(sites=4, t=1.0, u=4.0):
    terms = []
    for i in range(sites - 1):
        for spin in (0, 1):
            p, q = 2 * i + spin, 2 * (i + 1) + spin
            middle = " ".join(f"Z{k}" for k in range(p + 1, q))
            for a in "XY":
                terms.append((f"{a}{p} {middle} {a}{q}".replace("  ", " "), -t / 2))
    for i in range(sites):
        terms.append((f"Z{2 * i} Z{2 * i + 1}", u / 4))
    n = 2 * sites
    write(f"hubbard_{sites}site_{n}q", n, terms, f"hubbard-{sites}site", n_electrons=sites,
          note=f"open Hubbard chain t={t} U={u}, half filling")


def hydrogen(n_atoms, spacing, basis, name, label):
    from molecular import hydrogen_chain

    n_so, terms, e_hf = hydrogen_chain(n_atoms, spacing, basis)
    write(name, n_so, terms, label, n_electrons=n_atoms,
          note=f"H{n_atoms} chain {spacing} A {basis.upper()}, RHF canonical orbitals, Jordan-Wigner, E_HF={e_hf:.10f}")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    synthetic_2q()
    h2_sto3g()
    hubbard()
    hydrogen(2, 0.7414, "6-31g", "h2_631g_8q", "H2-631g")
    hydrogen(2, 0.7414, "6-311g", "h2_6311g_12q", "H2-6311g")
    hydrogen(4, 1.0, "sto-3g", "h4_sto3g_8q", "H4-sto3g")
    hydrogen(6, 1.0, "sto-3g", "h6_sto3g_12q", "H6-sto3g")
