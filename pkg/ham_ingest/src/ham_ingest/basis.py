"""Minimal STO-3G basis set and contracted-Gaussian bookkeeping.

Only the elements needed here (H, Be) are tabulated.  Exponents and
contraction coefficients are the published STO-3G values; p shells share
exponents with the 2s shell (sp shells).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# element -> list of shells (kind, exponents, coefficients)
STO3G = {
    "H": [
        ("s", [3.42525091, 0.62391373, 0.16885540],
              [0.15432897, 0.53532814, 0.44463454]),
    ],
    "Be": [
        ("s", [30.16787069, 5.49511530, 1.48719265],
              [0.15432897, 0.53532814, 0.44463454]),
        ("s", [1.31483311, 0.30553894, 0.09937074],
              [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [1.31483311, 0.30553894, 0.09937074],
              [0.15591627, 0.60768372, 0.39195739]),
    ],
}

NUCLEAR_CHARGE = {"H": 1, "Be": 4}

# electrons supplied by each neutral atom
ELECTRON_COUNT = NUCLEAR_CHARGE


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, lmn: tuple[int, int, int]) -> float:
    """Normalization constant of a primitive Cartesian Gaussian."""
    l, m, n = lmn
    num = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return num / den


@dataclass
class ContractedGaussian:
    """One contracted Cartesian Gaussian basis function."""

    center: np.ndarray
    lmn: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # contraction coefficients, primitives normalized
    norms: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.center = np.asarray(self.center, dtype=float)
        self.exponents = np.asarray(self.exponents, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self.norms = np.array(
            [primitive_norm(a, self.lmn) for a in self.exponents]
        )

    def normalize(self, self_overlap: float) -> None:
        """Rescale contraction coefficients so <g|g> = 1."""
        self.coefficients = self.coefficients / np.sqrt(self_overlap)


_P_DIRECTIONS = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def build_basis(symbols: list[str], coords_bohr: np.ndarray) -> list[ContractedGaussian]:
    """Expand the STO-3G shells of a molecule into Cartesian basis functions.

    Order: atoms as given; per atom the shells in tabulated order; p shells
    expand to (px, py, pz).
    """
    funcs: list[ContractedGaussian] = []
    for symbol, center in zip(symbols, coords_bohr):
        if symbol not in STO3G:
            raise ValueError(f"no STO-3G data for element {symbol!r}")
        for kind, exps, coefs in STO3G[symbol]:
            if kind == "s":
                funcs.append(ContractedGaussian(center, (0, 0, 0), exps, coefs))
            elif kind == "p":
                for lmn in _P_DIRECTIONS:
                    funcs.append(ContractedGaussian(center, lmn, exps, coefs))
            else:  # pragma: no cover - table only holds s and p
                raise ValueError(f"unsupported shell kind {kind!r}")
    return funcs
