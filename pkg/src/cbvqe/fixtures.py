"""Bundled example Hamiltonians (JSON files under ``cbvqe/data``)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .pauli import PauliSum, load_hamiltonian


def fixture_paths() -> list[Path]:
    """Paths of all bundled Hamiltonian files, sorted by name."""
    root = resources.files("cbvqe") / "data"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def fixture_path(name: str) -> Path:
    for p in fixture_paths():
        if p.stem == name:
            return p
    raise KeyError(f"no bundled fixture named {name!r}")


def load_fixture(name: str) -> PauliSum:
    return load_hamiltonian(fixture_path(name))
