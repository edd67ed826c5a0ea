"""End-to-end generation of qubit-Hamiltonian JSON files for small molecules.

The emitted schema is the wire contract consumed by the training stack:

    {"name": str, "n_qubits": int, "hf_occupation": [0|1, ...],
     "terms": [{"coeff": float, "word": "IIXZ..."}, ...],
     "ground_energy_hint": float|null,
     "excitations": {"singles": [[r,p], ...], "doubles": [[s,r,q,p], ...]}}

Qubit 0 is the leftmost word character and the most significant basis-index
bit; spin orbitals are interleaved (even = up, odd = down).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import physical_constants

from . import integrals, jordan_wigner, scf
from .basis import ELECTRON_COUNT, NUCLEAR_CHARGE, build_basis

ANGSTROM_TO_BOHR = 1e-10 / physical_constants["Bohr radius"][0]


@dataclass
class MoleculeSpec:
    symbols: list[str]
    coordinates: list[tuple[float, float, float]]  # Angstrom
    basis: str = "sto-3g"
    charge: int = 0
    multiplicity: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.symbols) != len(self.coordinates):
            raise ValueError("symbols and coordinates must have equal length")
        if self.basis.lower() != "sto-3g":
            raise ValueError(f"unsupported basis {self.basis!r} (only sto-3g)")
        if self.charge != 0 or self.multiplicity != 1:
            raise ValueError("only neutral closed-shell molecules are supported")
        if not self.name:
            self.name = "".join(self.symbols)


@dataclass
class GeneratedHamiltonian:
    name: str
    n_qubits: int
    n_electrons: int
    hf_occupation: list[int]
    terms: dict[str, float]
    hf_energy: float
    ground_energy: float
    singles: list[list[int]] = field(default_factory=list)
    doubles: list[list[int]] = field(default_factory=list)


def spin_conserving_excitations(
    n_electrons: int, n_spin_orbitals: int
) -> tuple[list[list[int]], list[list[int]]]:
    """Spin-preserving single and double excitations from the HF reference.

    Interleaved spin convention; singles are [occupied, virtual], doubles
    are [occ1, occ2, virt1, virt2] with occ1 < occ2 and virt1 < virt2.
    """
    if not 0 < n_electrons < n_spin_orbitals:
        raise ValueError("need 0 < n_electrons < n_spin_orbitals")
    sz = [0 if i % 2 == 0 else 1 for i in range(n_spin_orbitals)]
    singles = [
        [r, p]
        for r in range(n_electrons)
        for p in range(n_electrons, n_spin_orbitals)
        if sz[r] == sz[p]
    ]
    doubles = [
        [s, r, q, p]
        for s in range(n_electrons - 1)
        for r in range(s + 1, n_electrons)
        for q in range(n_electrons, n_spin_orbitals - 1)
        for p in range(q + 1, n_spin_orbitals)
        if sz[s] + sz[r] == sz[q] + sz[p]
    ]
    return singles, doubles


def generate_hamiltonian(spec: MoleculeSpec) -> GeneratedHamiltonian:
    coords = np.asarray(spec.coordinates, dtype=float) * ANGSTROM_TO_BOHR
    charges = [NUCLEAR_CHARGE[s] for s in spec.symbols]
    n_electrons = sum(ELECTRON_COUNT[s] for s in spec.symbols) - spec.charge

    basis = build_basis(spec.symbols, coords)
    integrals.normalize_basis(basis)
    s_mat = integrals.overlap_matrix(basis)
    h_core = integrals.kinetic_matrix(basis) + integrals.nuclear_matrix(basis, charges, coords)
    eri = integrals.eri_tensor(basis)
    e_nuc = integrals.nuclear_repulsion(charges, coords)

    hf = scf.restricted_hartree_fock(s_mat, h_core, eri, n_electrons, e_nuc)

    c = hf.mo_coefficients
    h_mo = c.T @ h_core @ c
    eri_mo = np.einsum("up,vq,uvls,lr,st->pqrt", c, c, eri, c, c, optimize=True)

    h1, g2 = jordan_wigner.spin_orbital_integrals(h_mo, eri_mo)
    terms = jordan_wigner.jordan_wigner_hamiltonian(h1, g2, e_nuc)

    n_qubits = 2 * h_mo.shape[0]
    singles, doubles = spin_conserving_excitations(n_electrons, n_qubits)
    occupation = [1] * n_electrons + [0] * (n_qubits - n_electrons)
    ground = jordan_wigner.ground_energy(terms, n_qubits)

    return GeneratedHamiltonian(
        name=spec.name,
        n_qubits=n_qubits,
        n_electrons=n_electrons,
        hf_occupation=occupation,
        terms=terms,
        hf_energy=hf.energy,
        ground_energy=ground,
        singles=singles,
        doubles=doubles,
    )


def _sorted_terms(terms: dict[str, float]) -> list[dict[str, float | str]]:
    identity = "I" * len(next(iter(terms)))
    words = sorted(terms, key=lambda w: (w != identity, w))
    return [{"coeff": terms[w], "word": w} for w in words]


def write_hamiltonian_json(gen: GeneratedHamiltonian, out_path: str) -> None:
    payload = {
        "name": gen.name,
        "n_qubits": gen.n_qubits,
        "hf_occupation": gen.hf_occupation,
        "terms": _sorted_terms(gen.terms),
        "ground_energy_hint": gen.ground_energy,
        "excitations": {"singles": gen.singles, "doubles": gen.doubles},
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


MOLECULES = {
    "h2": lambda d: MoleculeSpec(
        symbols=["H", "H"],
        coordinates=[(0.0, 0.0, 0.0), (0.0, 0.0, d)],
        name=f"H2 sto-3g d={d:g}A",
    ),
    "beh2": lambda d: MoleculeSpec(
        symbols=["Be", "H", "H"],
        coordinates=[(0.0, 0.0, 0.0), (0.0, 0.0, d), (0.0, 0.0, -d)],
        name=f"BeH2 sto-3g d={d:g}A",
    ),
}


def generate(molecule: str, bond_length: float, out_path: str) -> GeneratedHamiltonian:
    """Generate and write the Hamiltonian file for a named molecule."""
    try:
        spec = MOLECULES[molecule.lower()](bond_length)
    except KeyError:
        raise ValueError(
            f"unknown molecule {molecule!r}; available: {sorted(MOLECULES)}"
        ) from None
    gen = generate_hamiltonian(spec)
    write_hamiltonian_json(gen, out_path)
    return gen
