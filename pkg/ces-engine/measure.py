#!/usr/bin/env python3
"""
CES Toolkit - Resolution of Unity
Moments of the coherent-state measure, the Meijer-G weight sigma solving the
Stieltjes moment problem, quadrature checks of both, and the radial density
of the resolution of unity.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import gammaln, poch

from coherent import hyper_params
from fock import structure_product
from model import ModelParams, Phase
from specfun import DEFAULT_ACCURACY, Accuracy, hyper_0f3, meijer_g40_04

logger = logging.getLogger(__name__)

MAX_VERIFIED_MOMENT = 8
_X_LOW = 1e-6
_LOG_GRID_POINTS = 801


@dataclass(frozen=True)
class MomentReport:
    params: ModelParams
    orders: List[int]
    quadrature: List[float]
    closed_form: List[float]
    rel_errors: List[float]
    x_upper: float

    def passed(self, tol: float) -> bool:
        return all(err <= tol for err in self.rel_errors)

    def max_rel_error(self, n_max: Optional[int] = None) -> float:
        errs = [e for n, e in zip(self.orders, self.rel_errors) if n_max is None or n <= n_max]
        return max(errs) if errs else 0.0


@dataclass(frozen=True)
class ResolutionReport:
    diagonal: List[float]
    target: List[float]
    max_deviation: float


@dataclass(frozen=True, eq=False)
class DensityProfile:
    params: ModelParams
    x: np.ndarray
    sigma: np.ndarray
    radial: np.ndarray


def moment(params: ModelParams, n: int) -> float:
    """M_n = 16^n n! prod_j (beta_j)_n, equal to the ladder product prod f_i^2."""
    if n < 0:
        raise ValueError(f"moment order must be non-negative, got {n}")
    return 16.0 ** n * math.factorial(n) * math.prod(poch(b, n) for b in hyper_params(params))


def moment_sequence(params: ModelParams, n_max: int) -> np.ndarray:
    return np.array([moment(params, n) for n in range(n_max + 1)])


def sigma_meijer_params(params: ModelParams) -> Tuple[Tuple[float, float, float, float], float]:
    """(b1..b4, normalisation) with sigma(x) = G^{40}_{04}(x/16 | b) / normalisation."""
    beta = hyper_params(params)
    b = (0.0,) + tuple(bj - 1.0 for bj in beta)
    log_norm = math.log(16.0) + sum(gammaln(bj) for bj in beta)
    return b, math.exp(log_norm)


def sigma_density(params: ModelParams, x, acc: Accuracy = DEFAULT_ACCURACY):
    """Weight sigma(x) on x > 0."""
    b, norm = sigma_meijer_params(params)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 0):
        raise ValueError("sigma is defined for x > 0 only")
    values = np.array([meijer_g40_04(b, xi / 16.0, acc) for xi in x_arr]) / norm
    return values.item() if np.ndim(x) == 0 else values


def _upper_limit(params: ModelParams, power: int, acc: Accuracy) -> float:
    """Double X until x^power sigma(x) drops below 1e-16 of its running peak."""
    x_upper = 1.0
    peak = 0.0
    while x_upper < 1e12:
        weight = abs(x_upper ** power * sigma_density(params, x_upper, acc))
        peak = max(peak, weight)
        if x_upper > 16.0 and weight < 1e-16 * peak:
            return x_upper
        x_upper *= 2.0
    raise RuntimeError(f"sigma moments of order {power - 1} do not decay for {params.describe()}")


def _sigma_on_log_grid(params: ModelParams, n_max: int, acc: Accuracy):
    x_upper = _upper_limit(params, n_max + 1, acc)
    u = np.linspace(math.log(_X_LOW), math.log(x_upper), _LOG_GRID_POINTS)
    x = np.exp(u)
    return u, x, sigma_density(params, x, acc), x_upper


def _quadrature_moments(params: ModelParams, n_max: int, acc: Accuracy) -> Tuple[List[float], float]:
    """Moments of sigma integrated in u = ln x, with the x < 1e-6 piece added as a power law."""
    b, _ = sigma_meijer_params(params)
    lead = min(b)
    u, x, sigma, x_upper = _sigma_on_log_grid(params, n_max, acc)
    du = u[1] - u[0]
    out = []
    for n in range(n_max + 1):
        body = float(sp_integrate.simpson(x ** (n + 1) * sigma, dx=du))
        head = x[0] ** (n + 1) * sigma[0] / (n + 1 + lead)
        out.append(body + head)
    return out, x_upper


def verify_moments(params: ModelParams, n_max: int, acc: Accuracy = DEFAULT_ACCURACY) -> MomentReport:
    """Compare quadrature moments of sigma with the closed form for n <= n_max."""
    if not 0 <= n_max <= MAX_VERIFIED_MOMENT:
        raise ValueError(f"n_max must lie in [0, {MAX_VERIFIED_MOMENT}], got {n_max}")
    quad, x_upper = _quadrature_moments(params, n_max, acc)
    closed = [moment(params, n) for n in range(n_max + 1)]
    errors = [abs(q - c) / c for q, c in zip(quad, closed)]
    for n, err in enumerate(errors):
        logger.debug("moment %d: rel error %.2e", n, err)
    return MomentReport(params, list(range(n_max + 1)), quad, closed, errors, x_upper)


def sigma_normalization(params: ModelParams, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """Integral of sigma over the half-line; 1 when sigma is correctly normalised."""
    return _quadrature_moments(params, 0, acc)[0][0]


def resolution_of_unity_check(params: ModelParams, dim: int, acc: Accuracy = DEFAULT_ACCURACY) -> ResolutionReport:
    """Diagonal of the measure-weighted projector sum against the identity.

    The matrix is diagonal by angular integration, so only <n|R|n> =
    M_n / prod f_i^2 is computed. In the unbroken phase |0> lies outside
    the span of the coherent states and its target is 0.
    """
    offset = 0 if params.phase is Phase.BROKEN else 1
    ladder_len = dim - offset
    if not 1 <= ladder_len <= MAX_VERIFIED_MOMENT + 1:
        raise ValueError(f"resolution check supports up to {MAX_VERIFIED_MOMENT + 1} ladder states")
    report = verify_moments(params, ladder_len - 1, acc)
    diagonal = [0.0] * offset + [q / structure_product(params, n) for n, q in enumerate(report.quadrature)]
    target = [0.0] * offset + [1.0] * ladder_len
    deviation = max(abs(d - t) for d, t in zip(diagonal, target))
    return ResolutionReport(diagonal, target, deviation)


def radial_density_profile(params: ModelParams, x_max: float, n_samples: int,
                           acc: Accuracy = DEFAULT_ACCURACY) -> DensityProfile:
    """sigma(x) and sigma(x) 0F3(x/16) sampled uniformly on (0, x_max]."""
    if not x_max > 0 or n_samples < 2:
        raise ValueError("density profile needs x_max > 0 and at least 2 samples")
    x = np.linspace(_X_LOW, x_max, n_samples)
    sigma = sigma_density(params, x, acc)
    beta = hyper_params(params)
    radial = sigma * np.array([hyper_0f3(*beta, xi / 16.0) for xi in x])
    return DensityProfile(params, x, sigma, radial)


def hankel_positivity(params: ModelParams, n_max: int) -> bool:
    """Both Hankel matrices of the moment sequence are positive definite."""
    moments = moment_sequence(params, n_max)
    k = n_max // 2
    for shift in (0, 1):
        size = k + 1 if 2 * k + shift <= n_max else k
        if size == 0:
            continue
        hankel = np.array([[moments[i + j + shift] for j in range(size)] for i in range(size)])
        scale = 1.0 / np.sqrt(np.diag(hankel))
        try:
            np.linalg.cholesky(hankel * scale[:, None] * scale[None, :])
        except np.linalg.LinAlgError:
            return False
    return True


def unimodal(values: np.ndarray) -> bool:
    """At most one interior local maximum."""
    diffs = np.sign(np.diff(values))
    diffs = diffs[diffs != 0]
    return int(np.sum((diffs[:-1] > 0) & (diffs[1:] < 0))) <= 1
