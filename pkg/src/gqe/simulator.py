"""Dense statevector simulation of excitation-gate circuits.

Single and double excitation gates are two-level rotations: the first
listed basis pattern maps to cos(θ/2)·itself + sin(θ/2)·partner (its
partner picks up the -sin entry).  For SingleExcitation on wires (p, q)
the rotated pair is |1_p 0_q> and |0_p 1_q>; for DoubleExcitation on
(p, q, r, s) it is |1_p 1_q 0_r 0_s> and |0_p 0_q 1_r 1_s>.  All other
basis states are fixed.

Everything here is a pure function of its inputs and safe to call
concurrently.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .errors import CapabilityError, NumericError
from .hamiltonian import Hamiltonian

if TYPE_CHECKING:  # pragma: no cover
    from .pool import OperatorPool

IMAG_RESIDUE_TOL = 1e-9
EXACT_DENSE_MAX_QUBITS = 10
EXACT_MAX_QUBITS = 16


class GateKind(enum.Enum):
    IDENTITY = "identity"
    SINGLE_EXCITATION = "single_excitation"
    DOUBLE_EXCITATION = "double_excitation"


_WIRE_COUNT = {
    GateKind.IDENTITY: 0,
    GateKind.SINGLE_EXCITATION: 2,
    GateKind.DOUBLE_EXCITATION: 4,
}


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    wires: tuple[int, ...] = ()
    angle: float = 0.0

    def __post_init__(self) -> None:
        if len(self.wires) != _WIRE_COUNT[self.kind]:
            raise ValueError(
                f"{self.kind.value} takes {_WIRE_COUNT[self.kind]} wires, "
                f"got {len(self.wires)}"
            )
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"duplicate wires in {self.wires}")
        if not math.isfinite(self.angle):
            raise ValueError("gate angle must be finite")


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int


def hartree_fock_state(n_qubits: int, occupation: Sequence[int]) -> StateVector:
    """Computational-basis state with the given occupation bit pattern."""
    if len(occupation) != n_qubits:
        raise ValueError(
            f"occupation length {len(occupation)} != n_qubits {n_qubits}"
        )
    if not set(occupation) <= {0, 1}:
        raise ValueError("occupation entries must be 0 or 1")
    index = 0
    for bit in occupation:
        index = (index << 1) | bit
    amplitudes = np.zeros(1 << n_qubits, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(amplitudes, n_qubits)


def _check_wires(wires: tuple[int, ...], n_qubits: int) -> None:
    for w in wires:
        if not 0 <= w < n_qubits:
            raise ValueError(f"wire {w} out of range for {n_qubits} qubits")


def _rotate_pair(
    amplitudes: np.ndarray, sel: np.ndarray, flip: int, angle: float
) -> None:
    # |A> -> cos(θ/2)|A> + sin(θ/2)|B>, |B> -> cos(θ/2)|B> - sin(θ/2)|A>
    ia = np.nonzero(sel)[0]
    ib = ia ^ flip
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    a = amplitudes[ia]
    b = amplitudes[ib]
    amplitudes[ia] = c * a - s * b
    amplitudes[ib] = s * a + c * b


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    """Apply one gate, returning a new state."""
    n = state.n_qubits
    _check_wires(gate.wires, n)
    if gate.kind is GateKind.IDENTITY:
        return StateVector(state.amplitudes.copy(), n)

    amplitudes = state.amplitudes.copy()
    idx = np.arange(amplitudes.size)
    bits = [1 << (n - 1 - w) for w in gate.wires]
    if gate.kind is GateKind.SINGLE_EXCITATION:
        bp, bq = bits
        sel = (idx & bp != 0) & (idx & bq == 0)
        _rotate_pair(amplitudes, sel, bp | bq, gate.angle)
    else:
        bp, bq, br, bs = bits
        sel = (
            (idx & bp != 0) & (idx & bq != 0)
            & (idx & br == 0) & (idx & bs == 0)
        )
        _rotate_pair(amplitudes, sel, bp | bq | br | bs, gate.angle)
    return StateVector(amplitudes, n)


def _apply_terms(h: Hamiltonian, psi: np.ndarray) -> np.ndarray:
    """H|psi> via the compiled bitmask form of the Pauli terms."""
    compiled = h.compiled
    idx = np.arange(psi.size)
    out = np.zeros_like(psi)
    for coeff, flip, yz, y_phase in zip(
        compiled.coefficients, compiled.flips, compiled.yz_masks, compiled.y_phases
    ):
        src = idx ^ flip
        signs = 1.0 - 2.0 * (np.bitwise_count(src & yz) & 1)
        out += (coeff * y_phase) * (signs * psi[src])
    return out


def expectation(state: StateVector, h: Hamiltonian) -> float:
    """<psi|H|psi> in Hartree; the imaginary residue is checked, then dropped."""
    if state.amplitudes.size != 1 << h.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, Hamiltonian has {h.n_qubits}"
        )
    value = np.vdot(state.amplitudes, _apply_terms(h, state.amplitudes))
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        raise NumericError(f"imaginary residue {value.imag:.3e} exceeds tolerance")
    return float(value.real)


def evaluate_sequence(
    pool: "OperatorPool", sequence: Sequence[int], h: Hamiltonian
) -> float:
    """Energy of the circuit that applies the pool gates of `sequence`, in
    order, to the Hartree-Fock state."""
    if pool.n_qubits != h.n_qubits:
        raise ValueError(
            f"pool is for {pool.n_qubits} qubits, Hamiltonian has {h.n_qubits}"
        )
    gates = pool.gates
    for token in sequence:
        if not 0 <= token < len(gates):
            raise ValueError(f"token {token} out of range for pool of size {len(gates)}")
    state = hartree_fock_state(h.n_qubits, h.hf_occupation)
    for token in sequence:
        gate = gates[token]
        if gate.kind is GateKind.IDENTITY:
            continue
        state = apply_gate(state, gate)
    return expectation(state, h)


def hamiltonian_matrix(h: Hamiltonian) -> np.ndarray:
    """Dense matrix of the Hamiltonian (small qubit counts only)."""
    if h.n_qubits > EXACT_DENSE_MAX_QUBITS:
        raise CapabilityError(
            f"dense matrix limited to {EXACT_DENSE_MAX_QUBITS} qubits"
        )
    dim = 1 << h.n_qubits
    compiled = h.compiled
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, flip, yz, y_phase in zip(
        compiled.coefficients, compiled.flips, compiled.yz_masks, compiled.y_phases
    ):
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & yz) & 1)
        mat[idx ^ flip, idx] += coeff * y_phase * signs
    return mat


def exact_ground_energy(h: Hamiltonian) -> float:
    """Minimum eigenvalue of the Hamiltonian.

    Dense diagonalization up to 10 qubits; iterative (Lanczos on a
    matrix-free operator) up to 16.
    """
    if h.n_qubits > EXACT_MAX_QUBITS:
        raise CapabilityError(
            f"exact diagonalization limited to {EXACT_MAX_QUBITS} qubits "
            f"(got {h.n_qubits})"
        )
    if h.n_qubits <= EXACT_DENSE_MAX_QUBITS:
        return float(np.linalg.eigvalsh(hamiltonian_matrix(h)).min())

    dim = 1 << h.n_qubits
    op = spla.LinearOperator(
        (dim, dim), matvec=lambda v: _apply_terms(h, v.astype(complex)), dtype=complex
    )
    values = spla.eigsh(
        op, k=1, which="SA", tol=1e-10, maxiter=50_000, return_eigenvectors=False
    )
    return float(values[0])
