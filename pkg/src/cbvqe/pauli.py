"""Pauli-string algebra on bit masks.

A Pauli string on N qubits is stored as two integer masks: ``x_mask`` marks
qubits carrying X or Y, ``z_mask`` marks qubits carrying Z or Y. Qubit 0 is
the least-significant bit everywhere in this package, both for masks and for
computational basis states (which are plain ``int`` indices).

With this encoding a term acts on a basis state as::

    P|i> = c * 1j**n_y * (-1)**popcount(z_mask & i) |i ^ x_mask>

which fixes Y|0> = i|1> and Y|1> = -i|0>.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import HamiltonianParseError

DEFAULT_DROP_THRESHOLD = 1e-12

_TOKEN = re.compile(r"^([XYZ])(\d+)$")
_Y_PHASES = (1, 1j, -1, -1j)


def popcount(x: int) -> int:
    return int(x).bit_count()


def parse_bitstring(bits: str) -> int:
    """Convert a printed bitstring (highest qubit first) to a basis index.

    ``"0011"`` has qubits 0 and 1 set and maps to 3.
    """
    bits = bits.strip()
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def format_bitstring(i: int, n_qubits: int) -> str:
    return format(i, f"0{n_qubits}b")


@dataclass(frozen=True)
class PauliTerm:
    x_mask: int
    z_mask: int
    coefficient: complex = 1.0

    @property
    def y_mask(self) -> int:
        return self.x_mask & self.z_mask

    @property
    def n_y(self) -> int:
        return popcount(self.y_mask)

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def key(self) -> tuple[int, int]:
        return (self.x_mask, self.z_mask)

    def with_coefficient(self, coefficient: complex) -> "PauliTerm":
        return PauliTerm(self.x_mask, self.z_mask, coefficient)

    def pauli_string(self) -> str:
        """Token form, e.g. ``"X0 Y1 Z3"``; empty for the identity."""
        tokens = []
        s = self.support
        q = 0
        while s >> q:
            if (s >> q) & 1:
                code = ((self.x_mask >> q) & 1) | (((self.z_mask >> q) & 1) << 1)
                tokens.append("_XZY"[code] + str(q))
            q += 1
        return " ".join(tokens)

    @classmethod
    def from_string(cls, text: str, coefficient: complex = 1.0, n_qubits: int | None = None) -> "PauliTerm":
        x_mask = z_mask = 0
        seen = set()
        for token in text.split():
            m = _TOKEN.match(token)
            if m is None:
                raise HamiltonianParseError(f"malformed Pauli token {token!r} in {text!r}")
            letter, q = m.group(1), int(m.group(2))
            if n_qubits is not None and q >= n_qubits:
                raise HamiltonianParseError(f"qubit index {q} out of range for {n_qubits} qubits in {text!r}")
            if q in seen:
                raise HamiltonianParseError(f"qubit {q} appears twice in {text!r}")
            seen.add(q)
            if letter in "XY":
                x_mask |= 1 << q
            if letter in "ZY":
                z_mask |= 1 << q
        return cls(x_mask, z_mask, coefficient)

    def __str__(self) -> str:
        return f"{self.coefficient} [{self.pauli_string()}]"


@dataclass(frozen=True)
class PauliSum:
    """Canonical weighted sum of Pauli strings.

    Build through :meth:`from_terms` (or :func:`parse_hamiltonian`) so that
    duplicate strings are merged and negligible coefficients dropped.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...]
    n_electrons: int | None = None
    label: str = ""
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        index = {}
        for k, t in enumerate(self.terms):
            if t.x_mask >= limit or t.z_mask >= limit:
                raise HamiltonianParseError(f"term {t.pauli_string()!r} acts outside {self.n_qubits} qubits")
            if t.key in index:
                raise ValueError("duplicate Pauli string; use PauliSum.from_terms to merge")
            index[t.key] = k
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_terms(
        cls,
        n_qubits: int,
        terms: Iterable[PauliTerm],
        *,
        n_electrons: int | None = None,
        label: str = "",
        drop_threshold: float = DEFAULT_DROP_THRESHOLD,
    ) -> "PauliSum":
        merged: dict[tuple[int, int], complex] = {}
        for t in terms:
            merged[t.key] = merged.get(t.key, 0.0) + t.coefficient
        kept = tuple(
            PauliTerm(x, z, c) for (x, z), c in merged.items() if abs(c) > drop_threshold
        )
        return cls(n_qubits, kept, n_electrons=n_electrons, label=label)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def index_of(self, term: PauliTerm) -> int | None:
        return self._index.get(term.key)

    @property
    def identity_coefficient(self) -> complex:
        k = self._index.get((0, 0))
        return 0.0 if k is None else self.terms[k].coefficient

    def is_hermitian(self, atol: float = DEFAULT_DROP_THRESHOLD) -> bool:
        # Pauli strings are Hermitian, so the sum is iff every weight is real.
        return all(abs(complex(t.coefficient).imag) <= atol for t in self.terms)

    def require_hermitian(self) -> None:
        if not self.is_hermitian():
            raise HamiltonianParseError("Hamiltonian has non-real Pauli coefficients")


def parse_hamiltonian(
    text: str,
    *,
    hermitian: bool = True,
    drop_threshold: float = DEFAULT_DROP_THRESHOLD,
) -> PauliSum:
    """Parse the JSON interchange format into a canonical :class:`PauliSum`.

    Expected layout::

        {"n_qubits": 4, "n_electrons": 2, "label": "H2",
         "terms": [{"pauli": "X0 Z3", "coeff": 0.25},
                   {"pauli": "", "coeff": [-0.1, 0.0]}]}

    Raises:
        HamiltonianParseError: on malformed JSON, bad term strings, qubit
            indices out of range, or (with ``hermitian=True``) complex
            coefficients.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise HamiltonianParseError("top-level JSON value must be an object")
    n_qubits = doc.get("n_qubits")
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, int) or n_qubits < 1:
        raise HamiltonianParseError("n_qubits must be a positive integer")
    n_electrons = doc.get("n_electrons")
    if n_electrons is not None and (
        isinstance(n_electrons, bool) or not isinstance(n_electrons, int) or not 0 <= n_electrons <= n_qubits
    ):
        raise HamiltonianParseError("n_electrons must be null or an integer in [0, n_qubits]")
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list):
        raise HamiltonianParseError("terms must be a list")

    terms = []
    for k, entry in enumerate(raw_terms):
        if not isinstance(entry, dict) or "pauli" not in entry or "coeff" not in entry:
            raise HamiltonianParseError(f"term {k} needs 'pauli' and 'coeff'")
        coeff = _parse_coefficient(entry["coeff"], k)
        if hermitian and abs(coeff.imag) > drop_threshold:
            raise HamiltonianParseError(f"term {k} has non-real coefficient {coeff} in a Hamiltonian")
        if hermitian:
            coeff = complex(coeff.real, 0.0)
        if not isinstance(entry["pauli"], str):
            raise HamiltonianParseError(f"term {k}: 'pauli' must be a string")
        terms.append(PauliTerm.from_string(entry["pauli"], coeff, n_qubits))

    return PauliSum.from_terms(
        n_qubits,
        terms,
        n_electrons=n_electrons,
        label=str(doc.get("label") or ""),
        drop_threshold=drop_threshold,
    )


def _parse_coefficient(value, k: int) -> complex:
    if isinstance(value, bool):
        raise HamiltonianParseError(f"term {k}: boolean coefficient")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise HamiltonianParseError(f"term {k}: coefficient must be a number or [re, im]")


def load_hamiltonian(path: str | Path, **kwargs) -> PauliSum:
    path = Path(path)
    H = parse_hamiltonian(path.read_text(encoding="utf-8"), **kwargs)
    if not H.label:
        H = PauliSum(H.n_qubits, H.terms, n_electrons=H.n_electrons, label=path.stem)
    return H


def dump_hamiltonian(H: PauliSum) -> str:
    terms = []
    for t in H.terms:
        c = complex(t.coefficient)
        terms.append({"pauli": t.pauli_string(), "coeff": c.real if c.imag == 0 else [c.real, c.imag]})
    doc = {"n_qubits": H.n_qubits, "n_electrons": H.n_electrons, "label": H.label, "terms": terms}
    return json.dumps(doc, indent=1)


def apply_term_to_basis(term: PauliTerm, i: int) -> tuple[complex, int]:
    """Return ``(phase, j)`` with ``term|i> = phase |j>``."""
    sign = -1 if popcount(term.z_mask & i) & 1 else 1
    return term.coefficient * _Y_PHASES[term.n_y % 4] * sign, i ^ term.x_mask


def connected_matrix_elements(H: PauliSum, i0: int, atol: float = DEFAULT_DROP_THRESHOLD) -> dict[int, complex]:
    """All nonzero ``<j|H|i0>``, keyed by basis index ``j``.

    Entries whose accumulated contributions cancel below ``atol`` are
    dropped. Keys are ordered by first appearance in the term list.
    """
    out: dict[int, complex] = {}
    for t in H.terms:
        phase, j = apply_term_to_basis(t, i0)
        out[j] = out.get(j, 0.0) + phase
    return {j: v for j, v in out.items() if abs(v) > atol}


def qubitwise_commute(a: PauliTerm, b: PauliTerm) -> bool:
    """True when on every qubit the two factors agree or one is identity."""
    overlap = a.support & b.support
    differ = (a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask)
    return (overlap & differ) == 0


def greedy_grouping(H: PauliSum) -> list[list[int]]:
    """Partition the non-identity terms into qubitwise-commuting groups.

    Terms are visited by descending ``|coefficient|`` (stable, so ties keep
    file order); each joins the first group whose members it all commutes
    with, otherwise it opens a new group. Returned indices refer to
    ``H.terms``. The identity term is left out: it needs no measurement.
    """
    order = sorted(
        (k for k, t in enumerate(H.terms) if not t.is_identity),
        key=lambda k: -abs(H.terms[k].coefficient),
    )
    groups: list[list[int]] = []
    for k in order:
        term = H.terms[k]
        for group in groups:
            if all(qubitwise_commute(term, H.terms[m]) for m in group):
                group.append(k)
                break
        else:
            groups.append([k])
    return groups


def one_norm(H: PauliSum) -> float:
    """Sum of ``|h_i|`` over the non-identity terms."""
    return float(sum(abs(t.coefficient) for t in H.terms if not t.is_identity))


def terms_coupling_to(H: PauliSum, i0: int) -> tuple[list[int], float]:
    """Terms that take ``|i0>`` to some basis state, with their one-norm.

    A Pauli string never annihilates a basis state, so every term qualifies,
    the identity included (it feeds ``<i0|H|i0>``). The returned norm bounds
    ``sum_j |<j|H|i0>|`` from above.
    """
    indices = list(range(len(H.terms)))
    return indices, float(sum(abs(H.terms[k].coefficient) for k in indices))


def coupling_norm(H: PauliSum, i0: int) -> float:
    """``sum_j |<j|H|i0>|``, the quantity bounded by :func:`terms_coupling_to`."""
    return float(sum(abs(v) for v in connected_matrix_elements(H, i0).values()))


def group_terms(H: PauliSum, groups: Sequence[Sequence[int]]) -> list[list[PauliTerm]]:
    return [[H.terms[k] for k in g] for g in groups]
