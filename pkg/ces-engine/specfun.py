#!/usr/bin/env python3
"""
CES Toolkit - Special Functions
Complex log-Gamma, confluent hypergeometric 1F1, generalised Laguerre
polynomials, 0F3 and the Meijer G^{40}_{04} function needed by the closed
forms of the radial-oscillator CES models.

All routines are pure functions of their arguments.

Author: CES Toolkit v1.0
Date: October 2026
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, logsumexp

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

# Lanczos g=7, n=9 coefficients
_LANCZOS_G = 7.0
_LANCZOS_C0 = 0.99999999999980993
_LANCZOS_P = np.array([
    676.5203681218851, -1259.1392167224028, 771.32342877765313,
    -176.61502916214059, 12.507343278686905, -0.13857109526572012,
    9.9843695780195716e-6, 1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class GammaPoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


class InvalidParameterError(ValueError):
    """Hypergeometric lower parameter is a non-positive integer."""


class NonConvergenceError(RuntimeError):
    """Series did not converge within the term cap."""


class ContourPlacementError(ValueError):
    """Mellin-Barnes line does not lie to the right of all Gamma poles."""


class MeijerConvergenceError(RuntimeError):
    """Mellin-Barnes quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class Accuracy:
    """Accuracy knobs shared by the series and contour routines.

    ``contour_abscissa=None`` places the vertical line automatically: at
    ``-min(b) + 0.25`` or further right at the saddle point of the integrand
    when the argument is large.
    """
    rel_tol: float = 1e-12
    max_terms: int = 10000
    contour_half_width: float = 4.0
    contour_abscissa: Optional[float] = None

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.contour_half_width > 0:
            raise ValueError(f"contour_half_width must be positive, got {self.contour_half_width}")


DEFAULT_ACCURACY = Accuracy()


@dataclass(frozen=True)
class MeijerResult:
    value: float
    imag_residual: float
    abscissa: float
    half_width: float
    step: float
    n_nodes: int


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def _as_output(arr: np.ndarray, scalar: bool):
    return arr.item() if scalar else arr


# ---------------------------------------------------------------------------
# log Gamma
# ---------------------------------------------------------------------------

def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 0.5."""
    zm = z - 1.0
    x = np.full_like(zm, _LANCZOS_C0)
    for i, p in enumerate(_LANCZOS_P):
        x = x + p / (zm + (i + 1))
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def log_gamma_complex(z):
    """Principal-branch log Gamma for complex (scalar or array) arguments.

    Reflection ``log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)`` is
    used for ``Re z < 0.5``.
    """
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)

    poles = (z_arr.imag == 0) & (z_arr.real <= 0) & (z_arr.real == np.round(z_arr.real))
    if np.any(poles):
        raise GammaPoleError(f"Gamma has a pole at z={z_arr[poles][0].real:g}")

    out = np.empty_like(z_arr)
    left = z_arr.real < 0.5
    if np.any(~left):
        out[~left] = _lanczos_log_gamma(z_arr[~left])
    if np.any(left):
        zl = z_arr[left]
        out[left] = math.log(math.pi) - np.log(np.sin(np.pi * zl)) - _lanczos_log_gamma(1.0 - zl)
    return _as_output(out, scalar)


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def _log_series(alpha: float, beta: float, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(log|S|, sign S) for S = sum_k (alpha)_k / ((beta)_k k!) t^k, t >= 0.

    Only the first few coefficients can change sign (k < -beta or k < -alpha);
    past them every term is positive, so the sum is stable for large t.
    """
    log_abs = np.zeros_like(t)
    sign = np.ones_like(t)
    live = t > 0
    if not np.any(live):
        return log_abs, sign
    tl = t[live]
    log_t = np.log(tl)
    t_max = float(tl.max())
    n_terms = int(t_max + 12.0 * math.sqrt(t_max) + abs(alpha - beta) + 64)

    while True:
        k = np.arange(n_terms, dtype=float)
        num = alpha + k[:-1]
        den = beta + k[:-1]
        with np.errstate(divide="ignore"):
            steps = np.log(np.abs(num)) - np.log(np.abs(den)) - np.log1p(k[:-1])
        log_coeff = np.concatenate(([0.0], np.cumsum(steps)))
        coeff_sign = np.concatenate(([1.0], np.cumprod(np.sign(num) * np.sign(den))))

        result = np.empty_like(tl)
        result_sign = np.empty_like(tl)
        converged = True
        for chunk in np.array_split(np.arange(tl.size), max(1, tl.size // 1024)):
            terms = log_coeff[None, :] + k[None, :] * log_t[chunk, None]
            weights = np.broadcast_to(coeff_sign, terms.shape)
            result[chunk], result_sign[chunk] = logsumexp(terms, axis=1, b=weights, return_sign=True)
            if np.any(terms[:, -1] - result[chunk] > -40.0):
                converged = False
                break
        if converged:
            break
        n_terms *= 2
        logger.debug("1F1 series extended to %d terms", n_terms)

    log_abs[live] = result
    sign[live] = result_sign
    return log_abs, sign


def _kummer_direct(a: float, b: float, z: np.ndarray, max_terms: int) -> np.ndarray:
    """Plain power series with exactly rounded (fsum) accumulation."""
    z_abs = float(np.max(np.abs(z))) if z.size else 0.0
    if z.size and float(np.min(z)) < -225.0 and not _is_nonpositive_int(a):
        logger.warning("1F1(%g, %g, z) summed directly down to z=%g; "
                       "expect accuracy loss beyond x ~ 15", a, b, float(np.min(z)))
    t = np.ones_like(z)
    partial = np.ones_like(z)
    terms = [t]
    for k in range(max_terms):
        t = t * ((a + k) / (b + k)) * z / (k + 1)
        terms.append(t)
        partial = partial + t
        if not np.any(t):
            break
        if k > z_abs and np.all(np.abs(t) <= _EPS * np.abs(partial)):
            break
    else:
        raise NonConvergenceError(f"1F1({a}, {b}, z) needed more than {max_terms} terms")
    stacked = np.vstack(terms)
    return np.array([math.fsum(col) for col in stacked.T])


def _check_kummer_b(a: float, b: float):
    if _is_nonpositive_int(b) and not (_is_nonpositive_int(a) and a >= b):
        raise InvalidParameterError(f"1F1 lower parameter b={b} is a non-positive integer")


def kummer_1f1(a: float, b: float, z, max_terms: int = DEFAULT_ACCURACY.max_terms):
    """Confluent hypergeometric function 1F1(a; b; z) for real arguments.

    Non-positive integer ``a`` gives the terminating polynomial. For ``z < 0``
    the Kummer transformation ``1F1(a, b, z) = e^z 1F1(b - a, b, -z)`` turns
    the series into one whose tail is positive, summed in log space.
    """
    _check_kummer_b(a, b)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)

    if a == 0:
        return _as_output(np.ones_like(z_arr), scalar)
    if _is_nonpositive_int(a):
        return _as_output(_kummer_direct(a, b, z_arr, max_terms), scalar)

    out = np.empty_like(z_arr)
    transform = z_arr < 0
    if np.any(transform):
        zt = z_arr[transform]
        log_abs, sign = _log_series(b - a, b, -zt)
        out[transform] = sign * np.exp(zt + log_abs)
    if np.any(~transform):
        out[~transform] = _kummer_direct(a, b, z_arr[~transform], max_terms)
    return _as_output(out, scalar)


def kummer_1f1_deriv(a: float, b: float, z, max_terms: int = DEFAULT_ACCURACY.max_terms):
    """d/dz 1F1(a; b; z) = (a/b) 1F1(a+1; b+1; z)."""
    _check_kummer_b(a, b)
    if a == 0:
        z_arr = np.asarray(z, dtype=float)
        return _as_output(np.zeros_like(np.atleast_1d(z_arr)), z_arr.ndim == 0)
    return (a / b) * kummer_1f1(a + 1, b + 1, z, max_terms)


def kummer_1f1_ratio(a: float, b: float, z, max_terms: int = DEFAULT_ACCURACY.max_terms):
    """1F1(a+1; b+1; z) / 1F1(a; b; z), stable for large negative z."""
    _check_kummer_b(a, b)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)

    out = np.empty_like(z_arr)
    transform = (z_arr <= 0) & (not _is_nonpositive_int(a))
    if np.any(transform):
        t = -z_arr[transform]
        top, top_sign = _log_series(b - a, b + 1, t)
        bottom, bottom_sign = _log_series(b - a, b, t)
        out[transform] = top_sign * bottom_sign * np.exp(top - bottom)
    if np.any(~transform):
        zd = z_arr[~transform]
        out[~transform] = kummer_1f1(a + 1, b + 1, zd, max_terms) / kummer_1f1(a, b, zd, max_terms)
    return _as_output(out, scalar)


# ---------------------------------------------------------------------------
# Laguerre
# ---------------------------------------------------------------------------

def laguerre(n: int, nu: float, y):
    """Generalised Laguerre polynomial L_n^nu(y) by the three-term recurrence."""
    if n < 0:
        raise ValueError(f"Laguerre degree must be non-negative, got {n}")
    if nu <= -1:
        logger.warning("Laguerre L_%d^%g evaluated with nu <= -1 (not a quadrature weight)", n, nu)
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    y_arr = np.atleast_1d(y_arr)

    prev = np.ones_like(y_arr)
    if n == 0:
        return _as_output(prev, scalar)
    cur = 1.0 + nu - y_arr
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + nu - y_arr) * cur - (k + nu) * prev) / (k + 1)
    return _as_output(cur, scalar)


# ---------------------------------------------------------------------------
# 0F3
# ---------------------------------------------------------------------------

def _hyper_0f3_terms(b: Sequence[float], z: float, rel_tol: float, max_terms: int):
    for bi in b:
        if _is_nonpositive_int(bi):
            raise InvalidParameterError(f"0F3 lower parameter {bi} is a non-positive integer")
    b1, b2, b3 = b
    terms = [1.0]
    t = 1.0
    for k in range(max_terms):
        ratio = z / ((b1 + k) * (b2 + k) * (b3 + k) * (k + 1))
        t *= ratio
        terms.append(t)
        if t == 0.0:
            return terms
        if abs(ratio) < 1.0 and abs(t) <= rel_tol * abs(math.fsum(terms)):
            return terms
    raise NonConvergenceError(f"0F3{tuple(b)} at z={z} needed more than {max_terms} terms")


def hyper_0f3(b1: float, b2: float, b3: float, z: float,
              rel_tol: float = _EPS, max_terms: int = DEFAULT_ACCURACY.max_terms) -> float:
    """Generalised hypergeometric 0F3(;b1,b2,b3;z) by term recurrence."""
    return math.fsum(_hyper_0f3_terms((b1, b2, b3), float(z), rel_tol, max_terms))


def hyper_0f3_partial_sums(b1: float, b2: float, b3: float, z: float, n_terms: int) -> np.ndarray:
    """Partial sums S_0..S_{n_terms-1} of the 0F3 series."""
    t = 1.0
    terms = [1.0]
    for k in range(n_terms - 1):
        t *= z / ((b1 + k) * (b2 + k) * (b3 + k) * (k + 1))
        terms.append(t)
    return np.array([math.fsum(terms[:k + 1]) for k in range(n_terms)])


# ---------------------------------------------------------------------------
# Meijer G^{40}_{04}
# ---------------------------------------------------------------------------

def _saddle_abscissa(b: np.ndarray, log_z: float, lower: float) -> float:
    """Abscissa where sum psi(b_j + c) = log z, clipped below at ``lower``."""
    def slope(c):
        return float(np.sum(digamma(b + c))) - log_z

    if slope(lower) >= 0:
        return lower
    hi = max(2.0 * lower, lower + 1.0)
    while slope(hi) < 0:
        hi *= 2.0
    return brentq(slope, lower, hi, xtol=1e-10)


def _mellin_integrand(b: np.ndarray, c: float, log_z: float, t: np.ndarray) -> np.ndarray:
    s = c + 1j * t
    log_val = -s * log_z
    for bj in b:
        log_val = log_val + log_gamma_complex(bj + s)
    return np.exp(log_val)


def _trapezoid(values: np.ndarray, h: float) -> complex:
    return h * (values.sum() - 0.5 * (values[0] + values[-1]))


def meijer_g40_04_detail(b: Sequence[float], z: float, acc: Accuracy = DEFAULT_ACCURACY) -> MeijerResult:
    """G^{40}_{04}(z | b1..b4) by direct Mellin-Barnes quadrature.

    G = (1/2pi) * integral over t in [-T, T] of
        prod_j Gamma(b_j + c + i t) * z^(-c - i t) dt
    with trapezoid steps halved until converged and T doubled until the
    integrand tail is below ``rel_tol`` of its peak.
    """
    if not z > 0:
        raise ValueError(f"Meijer G argument must be positive, got {z}")
    b_arr = np.sort(np.asarray(b, dtype=float))
    if b_arr.shape != (4,):
        raise ValueError("G^{40}_{04} takes exactly four b parameters")
    log_z = math.log(z)
    pole_edge = -float(b_arr[0])

    if acc.contour_abscissa is not None:
        c = float(acc.contour_abscissa)
        if c <= pole_edge:
            raise ContourPlacementError(
                f"contour abscissa c={c} must exceed -min(b)={pole_edge}")
    else:
        c = _saddle_abscissa(b_arr, log_z, pole_edge + 0.25)

    peak = abs(_mellin_integrand(b_arr, c, log_z, np.zeros(1))[0])
    half_width = acc.contour_half_width
    for _ in range(12):
        edge = np.abs(_mellin_integrand(b_arr, c, log_z, np.array([-half_width, half_width])))
        if np.all(edge <= acc.rel_tol * peak):
            break
        half_width *= 2.0
    else:
        raise MeijerConvergenceError(
            f"Mellin-Barnes tail did not decay below {acc.rel_tol:g} of peak (z={z}, T={half_width})")

    step = min(0.5, half_width / 16.0)
    n_nodes = int(round(2 * half_width / step)) + 1
    t = np.linspace(-half_width, half_width, n_nodes)
    values = _mellin_integrand(b_arr, c, log_z, t)
    integral = _trapezoid(values, t[1] - t[0])
    for _ in range(16):
        n_nodes = 2 * n_nodes - 1
        t = np.linspace(-half_width, half_width, n_nodes)
        values = _mellin_integrand(b_arr, c, log_z, t)
        step = t[1] - t[0]
        refined = _trapezoid(values, step)
        mass = step * float(np.abs(values).sum())
        if abs(refined - integral) <= acc.rel_tol * mass:
            integral = refined
            break
        integral = refined
    else:
        raise MeijerConvergenceError(
            f"Mellin-Barnes trapezoid did not converge to {acc.rel_tol:g} (z={z})")

    value = integral.real / (2.0 * math.pi)
    imag_residual = abs(integral.imag) / (2.0 * math.pi)
    if imag_residual > acc.rel_tol * max(abs(value), 1e-300) and imag_residual > acc.rel_tol * mass:
        logger.warning("Meijer G imaginary residual %.3e at z=%g", imag_residual, z)
    return MeijerResult(value, imag_residual, c, half_width, step, n_nodes)


def meijer_g40_04(b: Sequence[float], z: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    return meijer_g40_04_detail(b, z, acc).value


def meijer_g40_04_moment(b: Sequence[float], n: int) -> float:
    """Mellin moment integral z^n G dz = prod_j Gamma(b_j + n + 1)."""
    return float(np.exp(np.sum(np.real(log_gamma_complex(np.asarray(b, dtype=float) + n + 1)))))
