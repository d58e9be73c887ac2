"""Stabilizer simulation, graph-state devices and the parity reductions built on them."""

from .pauli import ContradictionError, PauliString, StabilizerTableau, gate
from .diag import DiagWord, cnot, pentagram

__version__ = "0.1.0"

__all__ = ["ContradictionError", "PauliString", "StabilizerTableau", "gate", "DiagWord", "cnot",
           "pentagram", "__version__"]
