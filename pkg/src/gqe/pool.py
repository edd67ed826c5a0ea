"""Operator pool construction and token-to-gate mapping.

Spin orbitals are interleaved (even index = spin-up, odd index = spin-down
of the same spatial orbital) and the Hartree-Fock reference occupies the
lowest `n_electrons` of them.  The pool is ordered identity first, then
excitation-major / angle-minor: all angles of the first single excitation,
the next single, ..., then the doubles.  Token IDs are stable for a given
(n_electrons, n_qubits, angle_set).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .hamiltonian import Hamiltonian
from .simulator import GateKind, GateSpec

# sequence of pool token IDs; fixed length N in any given run
CircuitSequence = tuple[int, ...]

# rotation angles {±2^k/160} for k = 1..4, ascending
DEFAULT_ANGLES = (-0.1, -0.05, -0.025, -0.0125, 0.0125, 0.025, 0.05, 0.1)


def default_angle_set() -> tuple[float, ...]:
    """The quantized rotation-angle set, ascending."""
    return DEFAULT_ANGLES


def enumerate_excitations(
    n_electrons: int, n_qubits: int
) -> tuple[list[tuple[int, int]], list[tuple[int, int, int, int]]]:
    """Spin-preserving single and double excitations from the HF reference.

    Singles are (occupied, virtual); doubles are (occ1, occ2, virt1, virt2)
    with occ1 < occ2 and virt1 < virt2.
    """
    if n_electrons < 1 or n_qubits < 1:
        raise ValueError("electron and qubit counts must be positive")
    if n_electrons >= n_qubits:
        raise ValueError(
            f"need n_electrons < n_qubits, got ({n_electrons}, {n_qubits})"
        )
    spin = [i % 2 for i in range(n_qubits)]
    singles = [
        (r, p)
        for r in range(n_electrons)
        for p in range(n_electrons, n_qubits)
        if spin[r] == spin[p]
    ]
    doubles = [
        (s, r, q, p)
        for s in range(n_electrons - 1)
        for r in range(s + 1, n_electrons)
        for q in range(n_electrons, n_qubits - 1)
        for p in range(q + 1, n_qubits)
        if spin[s] + spin[r] == spin[q] + spin[p]
    ]
    return singles, doubles


@dataclass(frozen=True)
class OperatorPool:
    gates: tuple[GateSpec, ...]
    n_qubits: int
    n_electrons: int
    angle_set: tuple[float, ...]
    singles: tuple[tuple[int, int], ...]
    doubles: tuple[tuple[int, int, int, int], ...]

    @property
    def size(self) -> int:
        return len(self.gates)


def build_pool(
    n_electrons: int, n_qubits: int, angle_set: Sequence[float] | None = None
) -> OperatorPool:
    """Identity plus every (excitation x angle), deterministically ordered."""
    angles = DEFAULT_ANGLES if angle_set is None else tuple(angle_set)
    if not angles:
        raise ValueError("angle set must be non-empty")
    if not all(math.isfinite(a) for a in angles):
        raise ValueError("angle set must be finite")

    singles, doubles = enumerate_excitations(n_electrons, n_qubits)
    gates: list[GateSpec] = [GateSpec(GateKind.IDENTITY)]
    for wires in singles:
        gates.extend(
            GateSpec(GateKind.SINGLE_EXCITATION, wires, angle) for angle in angles
        )
    for wires in doubles:
        gates.extend(
            GateSpec(GateKind.DOUBLE_EXCITATION, wires, angle) for angle in angles
        )
    return OperatorPool(
        gates=tuple(gates),
        n_qubits=n_qubits,
        n_electrons=n_electrons,
        angle_set=angles,
        singles=tuple(singles),
        doubles=tuple(doubles),
    )


def pool_for_hamiltonian(
    h: Hamiltonian, angle_set: Sequence[float] | None = None
) -> OperatorPool:
    """Build the pool for a Hamiltonian, cross-checking any excitation lists
    shipped in its file against our own enumeration."""
    pool = build_pool(h.n_electrons, h.n_qubits, angle_set)
    if h.excitations is not None:
        if (
            pool.singles != h.excitations.singles
            or pool.doubles != h.excitations.doubles
        ):
            raise ValueError(
                "excitation lists in the Hamiltonian file do not match the "
                "pool builder's enumeration (convention drift?)"
            )
    return pool


def token_to_gate(pool: OperatorPool, token: int) -> GateSpec:
    if not 0 <= token < pool.size:
        raise ValueError(f"token {token} out of range [0, {pool.size})")
    return pool.gates[token]
