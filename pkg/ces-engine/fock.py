#!/usr/bin/env python3
"""
CES Toolkit - Fock-Space Algebra
Structure functions, the polynomials Phi and Psi of the deformed algebra,
and truncated sparse matrices for D, D^dagger, H-, the rotated quadratures
X1, X2 and the Casimir.

Basis |n> is the n-th eigenstate of H-. D|n> = e_n |n-1> with
  broken    e_n = f_n for n >= 1
  unbroken  e_1 = 0 and e_n = g_{n-1} for n >= 2
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy import sparse
from scipy.special import poch

from model import ModelParams, Phase, energy

logger = logging.getLogger(__name__)


class NegativeRadicandError(ArithmeticError):
    """Structure function squared came out negative (parameters outside the phase)."""


class OpKind(str, Enum):
    D = "D"
    D_DAG = "D_dag"
    H = "H"
    X1 = "X1"
    X2 = "X2"
    PHI = "Phi"
    PSI = "Psi"
    CASIMIR = "C"


@dataclass(frozen=True, eq=False)
class FockOp:
    kind: OpKind
    dim: int
    params: ModelParams
    matrix: sparse.csr_matrix

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, vector: np.ndarray) -> np.ndarray:
        if np.shape(vector)[0] != self.dim:
            raise ValueError(f"dimension mismatch: operator {self.dim}, vector {np.shape(vector)[0]}")
        return self.matrix @ vector


# ---------------------------------------------------------------------------
# Structure functions
# ---------------------------------------------------------------------------

def _radicand(gamma_eff: float, epsilon: float, n: int) -> float:
    g = gamma_eff
    return 16.0 * n * (n + g + 0.5) * (n + g + epsilon / 2.0) * (n + g + 1.0 + epsilon / 2.0)


def _structure(params: ModelParams, n: int, symbol: str) -> float:
    if n < 0:
        raise ValueError(f"level must be non-negative, got {n}")
    if n == 0:
        return 0.0
    if params.phase is Phase.BROKEN:
        rad = _radicand(params.gamma, params.epsilon, n)
    else:
        g, eps = params.gamma, params.epsilon
        rad = 16.0 * n * (n + g + 1.5) * (n + eps / 2.0 - 0.5) * (n + eps / 2.0 + 0.5)
    if rad < 0:
        raise NegativeRadicandError(f"{symbol}_{n}^2 = {rad:g} < 0 for {params.describe()}")
    return -math.sqrt(rad)


def f_n(params: ModelParams, n: int) -> float:
    """Broken-phase lowering factor: D|n> = f_n |n-1>."""
    if params.phase is not Phase.BROKEN:
        raise ValueError("f_n is defined for the broken phase; use g_n")
    return _structure(params, n, "f")


def g_n(params: ModelParams, n: int) -> float:
    """Unbroken-phase lowering factor on the excited ladder: D|n+1> = g_n |n>."""
    if params.phase is not Phase.UNBROKEN:
        raise ValueError("g_n is defined for the unbroken phase; use f_n")
    return _structure(params, n, "g")


def ladder_element(params: ModelParams, n: int) -> float:
    """Matrix element <n-1|D|n>."""
    if params.phase is Phase.BROKEN:
        return f_n(params, n)
    return g_n(params, n - 1) if n >= 2 else 0.0


def structure_product(params: ModelParams, n: int) -> float:
    """prod_{i<=n} of the squared structure functions along the ladder."""
    base = 1 if params.phase is Phase.BROKEN else 2
    return math.prod(ladder_element(params, i) ** 2 for i in range(base, base + n))


def normalized_state_coeff(params: ModelParams, n: int) -> float:
    """1 / prod f_i, cross-checked against its Pochhammer closed form.

    Unbroken phase: the same for the excited ladder built on |1>.
    """
    g, eps = params.gamma, params.epsilon
    if params.phase is Phase.BROKEN:
        factors = [ladder_element(params, i) for i in range(1, n + 1)]
        pochs = (g + 1.5, g + 1.0 + eps / 2.0, g + 2.0 + eps / 2.0)
    else:
        factors = [ladder_element(params, i) for i in range(2, n + 2)]
        pochs = (g + 2.5, eps / 2.0 + 0.5, eps / 2.0 + 1.5)
    product = 1.0 / math.prod(factors) if factors else 1.0
    closed = (-0.25) ** n / math.sqrt(math.factorial(n) * math.prod(poch(p, n) for p in pochs))
    if not math.isclose(product, closed, rel_tol=1e-10, abs_tol=0.0):
        raise ArithmeticError(f"ladder product {product!r} disagrees with closed form {closed!r} at n={n}")
    return product


# ---------------------------------------------------------------------------
# Algebra polynomials
# ---------------------------------------------------------------------------

def structure_function_coeffs(params: ModelParams) -> np.ndarray:
    """Ascending coefficients of Phi(H) = [D, D^dagger]."""
    g, eps = params.gamma_eff, params.epsilon
    return np.array([
        0.0,
        4.0 * (2.0 * eps * g + eps * eps + eps + 1.0),
        -12.0 * (g + eps + 0.5),
        8.0,
    ])


def phi(params: ModelParams, h):
    return Polynomial(structure_function_coeffs(params))(np.asarray(h, dtype=float))


def psi_coeffs(params: ModelParams) -> np.ndarray:
    """Ascending coefficients of Psi(H) = D D^dagger - C."""
    g, eps = params.gamma_eff, params.epsilon
    return Polynomial.fromroots([2.0 * g + eps, eps - 1.0, -2.0, 0.0]).coef


def psi(params: ModelParams, h):
    """Psi(H) = H (H + 2)(H - 2 gamma_eff - eps)(H + 1 - eps)."""
    return Polynomial(psi_coeffs(params))(np.asarray(h, dtype=float))


def psi_printed(params: ModelParams, h):
    """Variant with the factor (H + 1 + eps); it does not satisfy Psi(H) - Psi(H-2) = Phi(H)."""
    g, eps = params.gamma_eff, params.epsilon
    h = np.asarray(h, dtype=float)
    return h * (h + 2.0) * (h - 2.0 * g - eps) * (h + 1.0 + eps)


def shifted_difference_coeffs(params: ModelParams) -> np.ndarray:
    """Ascending coefficients of Psi(H) - Psi(H - 2)."""
    p = Polynomial(psi_coeffs(params))
    diff = p - p(Polynomial([-2.0, 1.0]))
    return diff.trim(tol=1e-12).coef


# ---------------------------------------------------------------------------
# Truncated operators
# ---------------------------------------------------------------------------

def _energies(params: ModelParams, dim: int) -> np.ndarray:
    return np.array([energy(params, n) for n in range(dim)])


def _lowering(params: ModelParams, dim: int) -> sparse.csr_matrix:
    elements = [ladder_element(params, n) for n in range(1, dim)]
    return sparse.diags([elements], [1], shape=(dim, dim), format="csr")


def build_fock_op(params: ModelParams, kind: Union[str, OpKind], dim: int) -> FockOp:
    kind = OpKind(kind)
    if dim < 2:
        raise ValueError(f"truncation dimension must be >= 2, got {dim}")

    if kind in (OpKind.D, OpKind.D_DAG, OpKind.X1, OpKind.X2, OpKind.CASIMIR):
        d = _lowering(params, dim)
        dd = d.T.tocsr()
    if kind in (OpKind.H, OpKind.PHI, OpKind.PSI, OpKind.CASIMIR):
        e = _energies(params, dim)

    if kind is OpKind.D:
        mat = d
    elif kind is OpKind.D_DAG:
        mat = dd
    elif kind is OpKind.H:
        mat = sparse.diags(e, format="csr")
    elif kind is OpKind.X1:
        mat = ((d + dd) / 2.0).tocsr()
    elif kind is OpKind.X2:
        mat = ((d - dd) / 2.0j).tocsr()
    elif kind is OpKind.PHI:
        mat = sparse.diags(phi(params, e), format="csr")
    elif kind is OpKind.PSI:
        mat = sparse.diags(psi(params, e), format="csr")
    else:
        mat = (d @ dd - sparse.diags(psi(params, e))).tocsr()
    return FockOp(kind, dim, params, mat)


def commutator(a: FockOp, b: FockOp) -> np.ndarray:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return (a.matrix @ b.matrix - b.matrix @ a.matrix).toarray()


def _interior(mat: np.ndarray) -> np.ndarray:
    return mat[:-1, :-1]


def _worst(mat: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(_interior(mat)))) / scale


def _scales(params: ModelParams, dim: int):
    e = _energies(params, dim)[:-1]
    phi_scale = max(float(np.max(np.abs(phi(params, e)))), 1.0)
    shift_scale = max(float(np.max(np.abs(_lowering(params, dim).toarray()))), 1.0)
    return phi_scale, shift_scale


def rotated_ops(params: ModelParams, dim: int) -> Dict[str, float]:
    """Commutator residuals of the rotated quadratures X1 = (D + D^dagger)/2, X2 = (D - D^dagger)/2i."""
    h, x1, x2, ph = (build_fock_op(params, k, dim) for k in (OpKind.H, OpKind.X1, OpKind.X2, OpKind.PHI))
    phi_scale, shift_scale = _scales(params, dim)
    return {
        "[H,X1]+2iX2": _worst(commutator(h, x1) + 2.0j * x2.to_dense(), shift_scale),
        "[H,X2]-2iX1": _worst(commutator(h, x2) - 2.0j * x1.to_dense(), shift_scale),
        "[X1,X2]-(i/2)Phi(H)": _worst(commutator(x1, x2) - 0.5j * ph.to_dense(), phi_scale),
    }


def algebra_residuals(params: ModelParams, dim: int) -> Dict[str, float]:
    """Max deviation of each algebra relation on the truncation interior.

    Entries are relative to the largest |Phi(E_n)| kept (the largest ladder
    element for the energy-shift relations).
    """
    d, dd, h, ph = (build_fock_op(params, k, dim) for k in (OpKind.D, OpKind.D_DAG, OpKind.H, OpKind.PHI))
    phi_scale, shift_scale = _scales(params, dim)
    residuals = {
        "[H,D]+2D": _worst(commutator(h, d) + 2.0 * d.to_dense(), shift_scale),
        "[H,D_dag]-2D_dag": _worst(commutator(h, dd) - 2.0 * dd.to_dense(), shift_scale),
        "[D,D_dag]-Phi(H)": _worst(commutator(d, dd) - ph.to_dense(), phi_scale),
    }
    residuals.update(rotated_ops(params, dim))
    return residuals


def casimir_residual(params: ModelParams, dim: int) -> float:
    """Largest |<m|C|n>| on the truncation interior."""
    c = build_fock_op(params, OpKind.CASIMIR, dim).to_dense()
    return float(np.max(np.abs(_interior(c))))
