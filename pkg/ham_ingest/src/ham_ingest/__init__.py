"""One-shot generator of qubit-Hamiltonian JSON files for small molecules."""

from .generate import (
    GeneratedHamiltonian,
    MoleculeSpec,
    generate,
    generate_hamiltonian,
    spin_conserving_excitations,
    write_hamiltonian_json,
)

__all__ = [
    "GeneratedHamiltonian",
    "MoleculeSpec",
    "generate",
    "generate_hamiltonian",
    "spin_conserving_excitations",
    "write_hamiltonian_json",
]

__version__ = "0.1.0"
