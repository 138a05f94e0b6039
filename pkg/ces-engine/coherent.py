#!/usr/bin/env python3
"""
CES Toolkit - Nonlinear Coherent States
Eigenstates of the lowering operator D expanded in the Fock basis of H-,
with adaptive truncation, overlaps, expectation values and the uncertainty
relation for the rotated quadratures X1, X2.

Author: CES Toolkit v1.0
Date: October 2026
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from fock import FockOp, OpKind, build_fock_op, commutator, ladder_element
from model import ModelParams, Phase
from specfun import hyper_0f3

logger = logging.getLogger(__name__)

# 0F3(|mu|^2/16) grows like exp(2 sqrt|mu|)
MU_OVERFLOW = (math.log(sys.float_info.max) / 2.0) ** 2


class TruncationError(RuntimeError):
    """The Fock expansion did not converge below the dimension cap."""


@dataclass(frozen=True, eq=False)
class CoherentState:
    mu: complex
    params: ModelParams
    N: int
    coeffs: np.ndarray
    c0: float
    truncation_tail: float
    exact_eigenstate: bool = field(default=True)

    @property
    def offset(self) -> int:
        return 0 if self.params.phase is Phase.BROKEN else 1

    def norm_squared(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)


@dataclass(frozen=True)
class ScanSegment:
    start: float
    end: float
    trend: str


@dataclass(frozen=True)
class MinUncertaintyScan:
    mu0: float
    f_min: float
    interior: bool
    segments: List[ScanSegment]
    samples: Tuple[Tuple[float, float], ...]


def hyper_params(params: ModelParams) -> Tuple[float, float, float]:
    """Lower parameters of the 0F3 normalising the coherent state."""
    g, eps = params.gamma, params.epsilon
    if params.phase is Phase.BROKEN:
        return g + 1.5, g + 1.0 + eps / 2.0, g + 2.0 + eps / 2.0
    return g + 2.5, eps / 2.0 + 0.5, eps / 2.0 + 1.5


def _ladder(params: ModelParams, k: int) -> float:
    """k-th lowering factor along the ladder the coherent state lives on."""
    return ladder_element(params, k if params.phase is Phase.BROKEN else k + 1)


def coherent_coeffs(params: ModelParams, mu: complex, rel_tail: float = 1e-14,
                    n_cap: int = 4096) -> CoherentState:
    """Fock coefficients c0 mu^n / prod_{i<=n} f_i with c0 = 0F3(|mu|^2/16)^(-1/2).

    N grows until the dropped tail, weighted by (1 + f_{n+1}^2) so that
    second moments of D converge as well, is below ``rel_tail``.
    """
    mu = complex(mu)
    offset = 0 if params.phase is Phase.BROKEN else 1
    r = abs(mu)
    try:
        series = hyper_0f3(*hyper_params(params), r * r / 16.0)
    except OverflowError:
        series = math.inf
    if not math.isfinite(series):
        raise TruncationError(
            f"normalisation 0F3(|mu|^2/16) overflows at |mu|={r:g}; |mu| must stay below about {MU_OVERFLOW:.3g}")
    c0 = series ** -0.5

    if r == 0.0:
        coeffs = np.zeros(offset + 2, dtype=complex)
        coeffs[offset] = 1.0
        return CoherentState(mu, params, offset + 2, coeffs, 1.0, 0.0)

    log_r = math.log(r)
    log_mag = [math.log(c0)]
    signs = [1.0]
    weighted = 0.0
    n = 0
    while True:
        s_next = _ladder(params, n + 1)
        w = math.exp(2.0 * log_mag[-1])
        weighted += w * (1.0 + s_next * s_next)
        ratio = r * r / (s_next * s_next)
        tail = w * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        if ratio < 0.5 and w * (1.0 + s_next * s_next) * 2.0 <= rel_tail * weighted:
            break
        if n + 1 + offset >= n_cap:
            raise TruncationError(
                f"coherent state |mu|={r:g} needs more than {n_cap} Fock levels for {params.describe()}")
        log_mag.append(log_mag[-1] + log_r - math.log(abs(s_next)))
        signs.append(signs[-1] * math.copysign(1.0, s_next))
        n += 1

    phases = np.exp(1j * math.atan2(mu.imag, mu.real) * np.arange(n + 1))
    body = np.array(signs) * np.exp(np.array(log_mag)) * phases
    dim = n + 1 + offset
    coeffs = np.zeros(dim, dtype=complex)
    coeffs[offset:] = body
    logger.debug("coherent state mu=%s truncated at N=%d (tail %.2e)", mu, dim, tail)
    return CoherentState(mu, params, dim, coeffs, c0, tail)


def ladder_state(params: ModelParams, n: int, dim: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise ValueError(f"level {n} outside truncation {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def raise_power_check(params: ModelParams, n: int) -> float:
    """|| (D^dagger)^n |ground> / prod f_i - |n> || on the ladder."""
    offset = 0 if params.phase is Phase.BROKEN else 1
    dim = offset + n + 2
    raise_op = build_fock_op(params, OpKind.D_DAG, dim)
    v = ladder_state(params, offset, dim)
    scale = 1.0
    for k in range(1, n + 1):
        v = raise_op @ v
        scale *= _ladder(params, k)
    return float(np.linalg.norm(v / scale - ladder_state(params, offset + n, dim)))


def _padded(state: CoherentState, dim: int) -> np.ndarray:
    out = np.zeros(dim, dtype=complex)
    out[:state.N] = state.coeffs
    return out


def op(state: CoherentState, kind: Union[str, OpKind]) -> FockOp:
    return build_fock_op(state.params, kind, state.N)


def eigenvalue_residual(state: CoherentState) -> float:
    """||(D - mu)|mu>|| excluding the last truncated slot."""
    residual = op(state, OpKind.D) @ state.coeffs - state.mu * state.coeffs
    return float(np.linalg.norm(residual[:-1]))


def overlap(a: CoherentState, b: CoherentState) -> complex:
    if a.params != b.params:
        raise ValueError("overlap between coherent states of different models")
    dim = max(a.N, b.N)
    return complex(np.vdot(_padded(a, dim), _padded(b, dim)))


def overlap_closed_form(a: CoherentState, b: CoherentState) -> float:
    """c0(a) c0(b) 0F3(conj(mu_a) mu_b / 16); real arguments only."""
    if a.params != b.params:
        raise ValueError("overlap between coherent states of different models")
    z = a.mu.conjugate() * b.mu / 16.0
    if abs(z.imag) > 1e-14 * max(abs(z), 1e-300):
        raise ValueError("closed-form overlap needs a real product conj(mu_a) mu_b")
    return a.c0 * b.c0 * hyper_0f3(*hyper_params(a.params), z.real)


def expectation(state: CoherentState, fock_op: FockOp) -> complex:
    if fock_op.dim != state.N:
        raise ValueError(f"dimension mismatch: operator {fock_op.dim}, state {state.N}")
    return complex(np.vdot(state.coeffs, fock_op @ state.coeffs))


def quadrature_variances(state: CoherentState) -> Tuple[float, float]:
    variances = []
    for kind in (OpKind.X1, OpKind.X2):
        xv = op(state, kind) @ state.coeffs
        mean = np.vdot(state.coeffs, xv).real
        variances.append(float(np.vdot(xv, xv).real - mean * mean))
    return variances[0], variances[1]


def uncertainty_product(state: CoherentState) -> Tuple[float, float]:
    """(DX1^2 DX2^2, |<Phi(H)>|^2 / 16); equal for exact eigenstates of D."""
    var1, var2 = quadrature_variances(state)
    mean_phi = expectation(state, op(state, OpKind.PHI))
    return var1 * var2, abs(mean_phi) ** 2 / 16.0


def phi_mean(state: CoherentState) -> float:
    """<D D^dagger> - |mu|^2, which equals <Phi(H)> for an eigenstate of D."""
    raised = op(state, OpKind.D_DAG) @ state.coeffs
    return float(np.vdot(raised, raised).real - abs(state.mu) ** 2)


def phi_expectation(params: ModelParams, mu: complex, rel_tail: float = 1e-14) -> float:
    """F(mu) = <mu|D D^dagger|mu> - |mu|^2 = <Phi(H)>."""
    return phi_mean(coherent_coeffs(params, mu, rel_tail=rel_tail))


def _segments(radii: np.ndarray, values: np.ndarray) -> List[ScanSegment]:
    segments: List[ScanSegment] = []
    start = 0
    trend = None
    for i in range(1, len(values)):
        step = "increasing" if values[i] > values[i - 1] else "decreasing"
        if trend is None:
            trend = step
        elif step != trend:
            segments.append(ScanSegment(float(radii[start]), float(radii[i - 1]), trend))
            start, trend = i - 1, step
    if trend is not None:
        segments.append(ScanSegment(float(radii[start]), float(radii[-1]), trend))
    return segments


def min_uncertainty_scan(params: ModelParams, mu_max: float, steps: int = 41) -> MinUncertaintyScan:
    """Minimise F over real mu in [0, mu_max]: grid scan, then golden-section refinement."""
    if steps < 3 or not mu_max > 0:
        raise ValueError("scan needs mu_max > 0 and at least 3 steps")
    radii = np.linspace(0.0, mu_max, steps)
    values = np.array([phi_expectation(params, r) for r in radii])
    best = int(np.argmin(values))
    samples = tuple((float(r), float(v)) for r, v in zip(radii, values))
    segments = _segments(radii, values)

    if best in (0, steps - 1):
        return MinUncertaintyScan(float(radii[best]), float(values[best]), False, segments, samples)

    try:
        refined = minimize_scalar(lambda r: phi_expectation(params, r),
                                  bracket=(radii[best - 1], radii[best], radii[best + 1]),
                                  method="golden", tol=1e-8)
        mu0, f_min = float(refined.x), float(refined.fun)
    except ValueError:
        logger.warning("golden refinement failed; keeping grid minimum at mu=%g", radii[best])
        mu0, f_min = float(radii[best]), float(values[best])
    return MinUncertaintyScan(mu0, f_min, True, segments, samples)


def perturbed_state(state: CoherentState, delta: float) -> CoherentState:
    """Add ``delta`` to the first excited ladder coefficient and renormalise.

    The result is no longer an eigenstate of D, so the uncertainty relation
    becomes strict.
    """
    dim = state.N + 2
    coeffs = _padded(state, dim)
    coeffs[state.offset + 1] += delta
    coeffs /= np.linalg.norm(coeffs)
    return CoherentState(state.mu, state.params, dim, coeffs, state.c0, state.truncation_tail,
                         exact_eigenstate=False)


def commutator_expectations(state: CoherentState) -> Dict[str, complex]:
    """<[H,X1]> + 2i<X2> and <[H,X2]> - 2i<X1>, both zero in any state."""
    h, x1, x2 = op(state, OpKind.H), op(state, OpKind.X1), op(state, OpKind.X2)
    v = state.coeffs

    def mean(mat: np.ndarray) -> complex:
        return complex(np.vdot(v, mat @ v))

    return {
        "[H,X1]+2iX2": mean(commutator(h, x1)) + 2.0j * expectation(state, x2),
        "[H,X2]-2iX1": mean(commutator(h, x2)) - 2.0j * expectation(state, x1),
    }
