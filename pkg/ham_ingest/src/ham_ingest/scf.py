"""Closed-shell restricted Hartree-Fock with DIIS acceleration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ScfError(RuntimeError):
    pass


@dataclass
class ScfResult:
    energy: float            # total energy incl. nuclear repulsion (Hartree)
    electronic_energy: float
    mo_coefficients: np.ndarray  # columns = MOs, ordered by orbital energy
    mo_energies: np.ndarray
    density: np.ndarray


def _build_fock(h_core: np.ndarray, eri: np.ndarray, density: np.ndarray) -> np.ndarray:
    j = np.einsum("pqrs,rs->pq", eri, density)
    k = np.einsum("prqs,rs->pq", eri, density)
    return h_core + j - 0.5 * k


def restricted_hartree_fock(
    s: np.ndarray,
    h_core: np.ndarray,
    eri: np.ndarray,
    n_electrons: int,
    e_nuc: float,
    max_iter: int = 200,
    conv: float = 1e-12,
    diis_depth: int = 8,
) -> ScfResult:
    if n_electrons % 2 != 0:
        raise ScfError("restricted HF requires an even electron count")
    n_occ = n_electrons // 2

    # symmetric orthogonalizer
    s_val, s_vec = np.linalg.eigh(s)
    if s_val.min() < 1e-10:
        raise ScfError("near-singular overlap matrix")
    x = s_vec @ np.diag(s_val**-0.5) @ s_vec.T

    def diagonalize(fock: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        eps, c_prime = np.linalg.eigh(x @ fock @ x)
        return eps, x @ c_prime

    eps, c = diagonalize(h_core)
    density = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T

    e_old = 0.0
    fock_hist: list[np.ndarray] = []
    err_hist: list[np.ndarray] = []
    for _ in range(max_iter):
        fock = _build_fock(h_core, eri, density)

        # DIIS: extrapolate over the commutator residuals FDS - SDF
        err = x.T @ (fock @ density @ s - s @ density @ fock) @ x
        fock_hist.append(fock)
        err_hist.append(err)
        if len(fock_hist) > diis_depth:
            fock_hist.pop(0)
            err_hist.pop(0)
        if len(fock_hist) > 1:
            m = len(fock_hist)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = np.vdot(err_hist[i], err_hist[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                fock = sum(wi * fi for wi, fi in zip(w, fock_hist))
            except np.linalg.LinAlgError:
                pass

        eps, c = diagonalize(fock)
        density_new = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        e_elec = 0.5 * np.einsum("pq,pq->", density_new, h_core + _build_fock(h_core, eri, density_new))

        d_rms = np.sqrt(np.mean((density_new - density) ** 2))
        density = density_new
        if abs(e_elec - e_old) < conv and d_rms < np.sqrt(conv):
            return ScfResult(
                energy=float(e_elec + e_nuc),
                electronic_energy=float(e_elec),
                mo_coefficients=c,
                mo_energies=eps,
                density=density,
            )
        e_old = e_elec
    raise ScfError(f"SCF failed to converge in {max_iter} iterations")
