"""Jordan-Wigner mapping of a second-quantized molecular Hamiltonian.

Spin orbitals are interleaved (even index = spin-up, odd = spin-down of the
same spatial orbital) and map one-to-one onto qubits; qubit 0 is the
leftmost character of a Pauli word.  Ladder operators carry the usual Z
string on all lower-index qubits.
"""
from __future__ import annotations

import numpy as np

# (left, right) -> (phase, product) for single-qubit Paulis
_PAULI_MUL = {
    ("I", "I"): (1.0, "I"), ("I", "X"): (1.0, "X"), ("I", "Y"): (1.0, "Y"), ("I", "Z"): (1.0, "Z"),
    ("X", "I"): (1.0, "X"), ("X", "X"): (1.0, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1.0, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1.0, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1.0, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1.0, "I"),
}


def _word_product(w1: tuple[str, ...], w2: tuple[str, ...]) -> tuple[complex, tuple[str, ...]]:
    phase = 1.0 + 0.0j
    out = []
    for a, b in zip(w1, w2):
        ph, c = _PAULI_MUL[(a, b)]
        phase *= ph
        out.append(c)
    return phase, tuple(out)


class PauliSum:
    """Sparse linear combination of Pauli words."""

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: dict[tuple[str, ...], complex] | None = None):
        self.n_qubits = n_qubits
        self.terms = terms or {}

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, {("I",) * n_qubits: complex(coeff)})

    def add(self, other: "PauliSum", scale: complex = 1.0) -> None:
        for word, coeff in other.terms.items():
            new = self.terms.get(word, 0.0) + scale * coeff
            if new == 0.0:
                self.terms.pop(word, None)
            else:
                self.terms[word] = new

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        out: dict[tuple[str, ...], complex] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                ph, w = _word_product(w1, w2)
                coeff = out.get(w, 0.0) + ph * c1 * c2
                if coeff == 0.0:
                    out.pop(w, None)
                else:
                    out[w] = coeff
        return PauliSum(self.n_qubits, out)

    def cleaned(self, tol: float = 1e-12) -> dict[str, float]:
        """Drop negligible terms; assert Hermiticity; return word-string map."""
        out: dict[str, float] = {}
        for word, coeff in self.terms.items():
            if abs(coeff.imag) > 1e-9:
                raise ValueError(f"non-Hermitian term {word}: {coeff}")
            if abs(coeff.real) > tol:
                out["".join(word)] = float(coeff.real)
        return out


def _ladder(index: int, n_qubits: int, dagger: bool) -> PauliSum:
    sign = -1.0 if dagger else 1.0
    x_word = ["Z"] * index + ["X"] + ["I"] * (n_qubits - index - 1)
    y_word = ["Z"] * index + ["Y"] + ["I"] * (n_qubits - index - 1)
    return PauliSum(
        n_qubits,
        {tuple(x_word): 0.5 + 0.0j, tuple(y_word): sign * 0.5j},
    )


def spin_orbital_integrals(
    h_mo: np.ndarray, eri_mo: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Spatial MO integrals -> interleaved spin-orbital integrals.

    Returns (h1, g2) with g2[P,Q,R,S] = <PQ|RS> in physicists' notation.
    """
    n = h_mo.shape[0]
    n_so = 2 * n
    h1 = np.zeros((n_so, n_so))
    for p in range(n):
        for q in range(n):
            h1[2 * p, 2 * q] = h_mo[p, q]
            h1[2 * p + 1, 2 * q + 1] = h_mo[p, q]

    g2 = np.zeros((n_so, n_so, n_so, n_so))
    for p in range(n_so):
        for q in range(n_so):
            for r in range(n_so):
                if (p % 2) != (r % 2):
                    continue
                for s in range(n_so):
                    if (q % 2) != (s % 2):
                        continue
                    # <PQ|RS> = (pr|qs), chemists' -> physicists'
                    g2[p, q, r, s] = eri_mo[p // 2, r // 2, q // 2, s // 2]
    return h1, g2


def jordan_wigner_hamiltonian(
    h1: np.ndarray, g2: np.ndarray, e_nuc: float, tol: float = 1e-12
) -> dict[str, float]:
    """Map H = E_nuc + sum h1 a+p aq + 1/2 sum g2 a+p a+q as ar to Pauli terms."""
    n_so = h1.shape[0]
    total = PauliSum.identity(n_so, e_nuc)

    raises = [_ladder(p, n_so, dagger=True) for p in range(n_so)]
    lowers = [_ladder(p, n_so, dagger=False) for p in range(n_so)]

    for p in range(n_so):
        for q in range(n_so):
            coeff = h1[p, q]
            if abs(coeff) < tol:
                continue
            total.add(raises[p] * lowers[q], coeff)

    for p in range(n_so):
        for q in range(n_so):
            if q == p:
                continue
            left = raises[p] * raises[q]
            for r in range(n_so):
                for s in range(n_so):
                    if s == r:
                        continue
                    coeff = 0.5 * g2[p, q, r, s]
                    if abs(coeff) < tol:
                        continue
                    total.add(left * (lowers[s] * lowers[r]), coeff)

    return total.cleaned(tol)


_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def terms_to_sparse(terms: dict[str, float], n_qubits: int):
    """Explicit sparse matrix of a Pauli-term map (qubit 0 = leftmost = MSB)."""
    import scipy.sparse as sp

    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    mat = sp.csr_matrix((dim, dim), dtype=complex)
    for word, coeff in terms.items():
        flip = 0
        yz_mask = 0
        n_y = 0
        for pos, ch in enumerate(word):
            bit = 1 << (n_qubits - 1 - pos)
            if ch in "XY":
                flip |= bit
            if ch in "YZ":
                yz_mask |= bit
            if ch == "Y":
                n_y += 1
        masked = idx & yz_mask
        parity = np.zeros(dim, dtype=np.int64)
        m = masked.copy()
        while m.any():
            parity ^= m & 1
            m >>= 1
        phase = (1j) ** n_y * np.where(parity == 1, -1.0, 1.0)
        mat += sp.csr_matrix((coeff * phase, (idx ^ flip, idx)), shape=(dim, dim))
    return mat


def ground_energy(terms: dict[str, float], n_qubits: int) -> float:
    """Lowest eigenvalue of the Pauli-term Hamiltonian."""
    import scipy.sparse.linalg as spla

    mat = terms_to_sparse(terms, n_qubits)
    if n_qubits <= 8:
        return float(np.linalg.eigvalsh(mat.toarray()).min())
    val = spla.eigsh(mat, k=1, which="SA", tol=1e-10, maxiter=20000)[0][0]
    return float(val)
