"""Qubit coupled cluster (QCCSD) and Trotterized UCCSD VQE on a dense statevector."""

from qccsd.pauli import PauliSum, PauliTerm
from qccsd.fermion import ActiveSpace, FermionOperator, MolecularIntegrals
from qccsd.sim import Gate, StateVector

__all__ = [
    "ActiveSpace",
    "FermionOperator",
    "Gate",
    "MolecularIntegrals",
    "PauliSum",
    "PauliTerm",
    "StateVector",
]

__version__ = "0.1.0"
