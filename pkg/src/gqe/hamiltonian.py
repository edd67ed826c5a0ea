"""Pauli-sum Hamiltonians and their JSON wire format.

Conventions used throughout the package: a Pauli word is a string over
{I, X, Y, Z} whose leftmost character acts on qubit 0, and qubit 0 is the
most significant bit of a statevector basis index.

File schema (UTF-8 JSON):

    {"name": str, "n_qubits": int, "hf_occupation": [0|1, ...],
     "terms": [{"coeff": float, "word": "IIXZ..."}, ...],
     "ground_energy_hint": float|null,
     "excitations": {"singles": [[r,p],...], "doubles": [[s,r,q,p],...]}}

The "excitations" block is optional and, when present, is cross-checked
against the pool builder's own enumeration at load time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

_VALID_PAULIS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    word: str

    def __post_init__(self) -> None:
        if not math.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient in term {self.word!r}")
        if not set(self.word) <= _VALID_PAULIS:
            raise ValueError(f"invalid Pauli word {self.word!r}")


@dataclass(frozen=True)
class ExcitationLists:
    singles: tuple[tuple[int, int], ...]
    doubles: tuple[tuple[int, int, int, int], ...]


@dataclass
class Hamiltonian:
    n_qubits: int
    terms: list[PauliTerm]
    hf_occupation: list[int]
    name: str = ""
    ground_energy_hint: float | None = None
    excitations: ExcitationLists | None = None
    _compiled: "CompiledTerms | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        for term in self.terms:
            if len(term.word) != self.n_qubits:
                raise ValueError(
                    f"term {term.word!r} has length {len(term.word)}, "
                    f"expected {self.n_qubits}"
                )
        if len(self.hf_occupation) != self.n_qubits:
            raise ValueError("hf_occupation length must equal n_qubits")
        if not set(self.hf_occupation) <= {0, 1}:
            raise ValueError("hf_occupation entries must be 0 or 1")

    @property
    def n_electrons(self) -> int:
        return sum(self.hf_occupation)

    @property
    def compiled(self) -> "CompiledTerms":
        """Bitmask form of the terms, built once on first use."""
        if self._compiled is None:
            self._compiled = CompiledTerms.from_terms(self.terms, self.n_qubits)
        return self._compiled


@dataclass(frozen=True)
class CompiledTerms:
    """Terms as bitmasks: P|i> = i^{n_Y} (-1)^{popcount(i & yz)} |i XOR flip>."""

    coefficients: np.ndarray  # (n_terms,) float
    flips: np.ndarray         # (n_terms,) int64, X/Y positions
    yz_masks: np.ndarray      # (n_terms,) int64, Y/Z positions
    y_phases: np.ndarray      # (n_terms,) complex, i**n_Y

    @classmethod
    def from_terms(cls, terms: list[PauliTerm], n_qubits: int) -> "CompiledTerms":
        n = len(terms)
        coeffs = np.empty(n)
        flips = np.zeros(n, dtype=np.int64)
        yz = np.zeros(n, dtype=np.int64)
        y_phases = np.empty(n, dtype=complex)
        for k, term in enumerate(terms):
            n_y = 0
            for pos, ch in enumerate(term.word):
                bit = 1 << (n_qubits - 1 - pos)
                if ch in "XY":
                    flips[k] |= bit
                if ch in "YZ":
                    yz[k] |= bit
                if ch == "Y":
                    n_y += 1
            coeffs[k] = term.coefficient
            y_phases[k] = 1j**n_y
        return cls(coeffs, flips, yz, y_phases)


def _parse_excitations(block: dict) -> ExcitationLists:
    singles = tuple(tuple(int(x) for x in s) for s in block.get("singles", []))
    doubles = tuple(tuple(int(x) for x in d) for d in block.get("doubles", []))
    if any(len(s) != 2 for s in singles) or any(len(d) != 4 for d in doubles):
        raise ValueError("malformed excitations block")
    return ExcitationLists(singles=singles, doubles=doubles)


def hamiltonian_from_dict(data: dict) -> Hamiltonian:
    try:
        terms = [PauliTerm(float(t["coeff"]), str(t["word"])) for t in data["terms"]]
        hint = data.get("ground_energy_hint")
        excitations = data.get("excitations")
        return Hamiltonian(
            n_qubits=int(data["n_qubits"]),
            terms=terms,
            hf_occupation=[int(b) for b in data["hf_occupation"]],
            name=str(data.get("name", "")),
            ground_energy_hint=None if hint is None else float(hint),
            excitations=None if excitations is None else _parse_excitations(excitations),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Hamiltonian data: {exc}") from exc


def load_hamiltonian(path: str) -> Hamiltonian:
    """Load and validate a Hamiltonian JSON file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return hamiltonian_from_dict(data)


def hamiltonian_to_dict(h: Hamiltonian) -> dict:
    data: dict = {
        "name": h.name,
        "n_qubits": h.n_qubits,
        "hf_occupation": list(h.hf_occupation),
        "terms": [{"coeff": t.coefficient, "word": t.word} for t in h.terms],
        "ground_energy_hint": h.ground_energy_hint,
    }
    if h.excitations is not None:
        data["excitations"] = {
            "singles": [list(s) for s in h.excitations.singles],
            "doubles": [list(d) for d in h.excitations.doubles],
        }
    return data


def save_hamiltonian(h: Hamiltonian, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hamiltonian_to_dict(h), fh, indent=1)
        fh.write("\n")
