"""One- and two-electron integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: Hermite expansion coefficients E recursively,
Coulomb integrals through the Boys function (via Kummer's 1F1, stable for
all arguments).  Loop-based and written for clarity; the molecules handled
here have at most a handful of basis functions.
"""
from __future__ import annotations

import numpy as np
from scipy.special import hyp1f1

from .basis import ContractedGaussian


def boys(n: int, x: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


def hermite_e(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """Hermite expansion coefficient E_t^{ij} for a Gaussian pair.

    qx is the center separation A_x - B_x along one axis.
    """
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return float(np.exp(-mu * qx * qx))
    if j == 0:
        # decrement i; (P - A)_x = -(b/p) qx
        return (
            1.0 / (2.0 * p) * hermite_e(i - 1, j, t - 1, qx, a, b)
            - mu * qx / a * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    # decrement j; (P - B)_x = +(a/p) qx
    return (
        1.0 / (2.0 * p) * hermite_e(i, j - 1, t - 1, qx, a, b)
        + mu * qx / b * hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def _overlap_prim(a, lmn1, ra, b, lmn2, rb) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    sx = hermite_e(l1, l2, 0, ra[0] - rb[0], a, b)
    sy = hermite_e(m1, m2, 0, ra[1] - rb[1], a, b)
    sz = hermite_e(n1, n2, 0, ra[2] - rb[2], a, b)
    return sx * sy * sz * (np.pi / p) ** 1.5


def _kinetic_prim(a, lmn1, ra, b, lmn2, rb) -> float:
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, ra, b, lmn2, rb)
    term1 = -2.0 * b**2 * (
        _overlap_prim(a, lmn1, ra, b, (l2 + 2, m2, n2), rb)
        + _overlap_prim(a, lmn1, ra, b, (l2, m2 + 2, n2), rb)
        + _overlap_prim(a, lmn1, ra, b, (l2, m2, n2 + 2), rb)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, ra, b, (l2 - 2, m2, n2), rb)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, ra, b, (l2, m2 - 2, n2), rb)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, ra, b, (l2, m2, n2 - 2), rb)
    )
    return term0 + term1 + term2


def hermite_coulomb(t: int, u: int, v: int, n: int, p: float, pc: np.ndarray, rpc: float) -> float:
    """Auxiliary Hermite Coulomb integral R^n_{tuv}."""
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * rpc * rpc)
    if t > 0:
        val = pc[0] * hermite_coulomb(t - 1, u, v, n + 1, p, pc, rpc)
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc, rpc)
        return val
    if u > 0:
        val = pc[1] * hermite_coulomb(t, u - 1, v, n + 1, p, pc, rpc)
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc, rpc)
        return val
    val = pc[2] * hermite_coulomb(t, u, v - 1, n + 1, p, pc, rpc)
    if v > 1:
        val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc, rpc)
    return val


def _nuclear_prim(a, lmn1, ra, b, lmn2, rb, rc) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    rpc = float(np.linalg.norm(pc))
    val = 0.0
    for t in range(l1 + l2 + 1):
        et = hermite_e(l1, l2, t, ra[0] - rb[0], a, b)
        for u in range(m1 + m2 + 1):
            eu = hermite_e(m1, m2, u, ra[1] - rb[1], a, b)
            for v in range(n1 + n2 + 1):
                ev = hermite_e(n1, n2, v, ra[2] - rb[2], a, b)
                val += et * eu * ev * hermite_coulomb(t, u, v, 0, p, pc, rpc)
    return 2.0 * np.pi / p * val


def _eri_prim(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd) -> float:
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    rpq = float(np.linalg.norm(pq))

    val = 0.0
    for t in range(l1 + l2 + 1):
        e1 = hermite_e(l1, l2, t, ra[0] - rb[0], a, b)
        for u in range(m1 + m2 + 1):
            e2 = hermite_e(m1, m2, u, ra[1] - rb[1], a, b)
            for v in range(n1 + n2 + 1):
                e3 = hermite_e(n1, n2, v, ra[2] - rb[2], a, b)
                for tau in range(l3 + l4 + 1):
                    e4 = hermite_e(l3, l4, tau, rc[0] - rd[0], c, d)
                    for nu in range(m3 + m4 + 1):
                        e5 = hermite_e(m3, m4, nu, rc[1] - rd[1], c, d)
                        for phi in range(n3 + n4 + 1):
                            e6 = hermite_e(n3, n4, phi, rc[2] - rd[2], c, d)
                            val += (
                                e1 * e2 * e3 * e4 * e5 * e6
                                * (-1.0) ** (tau + nu + phi)
                                * hermite_coulomb(
                                    t + tau, u + nu, v + phi, 0, alpha, pq, rpq
                                )
                            )
    return val * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def _contract2(f, ga: ContractedGaussian, gb: ContractedGaussian, *extra) -> float:
    val = 0.0
    for a, ca, na in zip(ga.exponents, ga.coefficients, ga.norms):
        for b, cb, nb in zip(gb.exponents, gb.coefficients, gb.norms):
            val += ca * cb * na * nb * f(a, ga.lmn, ga.center, b, gb.lmn, gb.center, *extra)
    return val


def normalize_basis(basis: list[ContractedGaussian]) -> None:
    for g in basis:
        g.normalize(_contract2(_overlap_prim, g, g))


def overlap_matrix(basis: list[ContractedGaussian]) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = _contract2(_overlap_prim, basis[i], basis[j])
    return s


def kinetic_matrix(basis: list[ContractedGaussian]) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            t[i, j] = t[j, i] = _contract2(_kinetic_prim, basis[i], basis[j])
    return t


def nuclear_matrix(
    basis: list[ContractedGaussian], charges: list[int], coords_bohr: np.ndarray
) -> np.ndarray:
    n = len(basis)
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for z, rc in zip(charges, coords_bohr):
                acc -= z * _contract2(_nuclear_prim, basis[i], basis[j], rc)
            v[i, j] = v[j, i] = acc
    return v


def eri_tensor(basis: list[ContractedGaussian]) -> np.ndarray:
    """Full (ij|kl) tensor in chemists' notation, 8-fold symmetry exploited."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    gi, gj, gk, gl = basis[i], basis[j], basis[k], basis[l]
                    val = 0.0
                    for a, ca, na in zip(gi.exponents, gi.coefficients, gi.norms):
                        for b, cb, nb in zip(gj.exponents, gj.coefficients, gj.norms):
                            for c, cc, nc in zip(gk.exponents, gk.coefficients, gk.norms):
                                for d, cd, nd in zip(gl.exponents, gl.coefficients, gl.norms):
                                    val += (
                                        ca * cb * cc * cd * na * nb * nc * nd
                                        * _eri_prim(
                                            a, gi.lmn, gi.center,
                                            b, gj.lmn, gj.center,
                                            c, gk.lmn, gk.center,
                                            d, gl.lmn, gl.center,
                                        )
                                    )
                    for p, q in ((i, j), (j, i)):
                        for r, s in ((k, l), (l, k)):
                            eri[p, q, r, s] = eri[r, s, p, q] = val
    return eri


def nuclear_repulsion(charges: list[int], coords_bohr: np.ndarray) -> float:
    e = 0.0
    for i in range(len(charges)):
        for j in range(i + 1, len(charges)):
            e += charges[i] * charges[j] / np.linalg.norm(coords_bohr[i] - coords_bohr[j])
    return float(e)
