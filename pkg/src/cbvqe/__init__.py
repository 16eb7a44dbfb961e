"""Measurement-cost analysis and sampling simulation for classically boosted VQE."""

from .analysis import AnalysisReport, analyze, prepare
from .pauli import PauliSum, PauliTerm, load_hamiltonian, parse_hamiltonian

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "PauliSum",
    "PauliTerm",
    "analyze",
    "load_hamiltonian",
    "parse_hamiltonian",
    "prepare",
]
