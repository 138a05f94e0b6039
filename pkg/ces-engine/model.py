#!/usr/bin/env python3
"""
CES Toolkit - Partner Hamiltonians
Parameters, superpotential, partner potentials, energies, eigenfunctions and
the grid action of the factorisation and ladder operators for the CES
partners of the radial harmonic oscillator.

Phases:
  broken    H+ is the oscillator with angular parameter gamma; H- is the
            rational extension obtained with the nodeless Kummer seed u.
  unbroken  gamma_eff = -gamma - 2; H- gains a zero mode at E = 0.

Author: CES Toolkit v1.0
Date: October 2026
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from quad import Grid, WaveFunction, WaveLabel, default_grid, derivative, integrate, interior_mask, norm
from specfun import InvalidParameterError, kummer_1f1, kummer_1f1_ratio, laguerre

logger = logging.getLogger(__name__)

# Built-in default for the model.level_cap config key
LEVEL_CAP = 24


class ParameterError(ValueError):
    """Model parameters outside the admissible region of their phase."""


class NodeError(ValueError):
    """The Kummer seed u vanishes on the working grid."""

    def __init__(self, x: float, params: "ModelParams"):
        super().__init__(f"seed function u has a node near x={x:.6g} for {params.describe()}")
        self.x = x


class Phase(str, Enum):
    BROKEN = "broken"
    UNBROKEN = "unbroken"


class Sector(str, Enum):
    PLUS = "+"
    MINUS = "-"

    @classmethod
    def parse(cls, value: Union[str, "Sector"]) -> "Sector":
        if isinstance(value, Sector):
            return value
        aliases = {"+": cls.PLUS, "plus": cls.PLUS, "-": cls.MINUS, "minus": cls.MINUS}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"sector must be '+' or '-', got {value!r}") from None


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    epsilon: float
    phase: Phase = Phase.BROKEN

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        try:
            object.__setattr__(self, "phase", Phase(self.phase))
        except ValueError:
            raise ParameterError(f"phase must be 'broken' or 'unbroken', got {self.phase!r}") from None

        if not math.isfinite(self.gamma) or not math.isfinite(self.epsilon):
            raise ParameterError(f"gamma and epsilon must be finite, got {self.gamma}, {self.epsilon}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got gamma={self.gamma:g}")
        if self.phase is Phase.BROKEN:
            if not self.epsilon > -2 * self.gamma - 2:
                raise ParameterError(
                    "broken phase requires epsilon > -2*gamma - 2; "
                    f"got gamma={self.gamma:g}, epsilon={self.epsilon:g}")
        else:
            if not self.epsilon > -1:
                raise ParameterError(
                    f"unbroken phase requires epsilon > -1; got epsilon={self.epsilon:g}")
            try:
                kummer_1f1(self.kummer_a, self.kummer_b, 0.0)
            except InvalidParameterError:
                raise ParameterError(
                    f"unbroken phase needs gamma + 1/2 non-integer for this epsilon; "
                    f"got gamma={self.gamma:g}, epsilon={self.epsilon:g}") from None
            _scan_for_nodes(self, Grid(1e-4, 12.0, 2001))

    @property
    def gamma_eff(self) -> float:
        return self.gamma if self.phase is Phase.BROKEN else -self.gamma - 2.0

    @property
    def plus_angular(self) -> float:
        """Angular parameter of the oscillator tower realised by H+."""
        return self.gamma if self.phase is Phase.BROKEN else self.gamma + 1.0

    @property
    def kummer_a(self) -> float:
        return (1.0 - self.epsilon) / 2.0

    @property
    def kummer_b(self) -> float:
        return self.gamma_eff + 1.5

    def describe(self) -> str:
        return f"{self.phase.value} gamma={self.gamma:g} epsilon={self.epsilon:g}"


# ---------------------------------------------------------------------------
# Seed function and superpotential
# ---------------------------------------------------------------------------

def seed_function(params: ModelParams, x) -> np.ndarray:
    """u(x) = 1F1((1-eps)/2, gamma_eff + 3/2, -x^2)."""
    x = np.asarray(x, dtype=float)
    return kummer_1f1(params.kummer_a, params.kummer_b, -x * x)


def seed_log_derivative(params: ModelParams, x) -> np.ndarray:
    """u'(x)/u(x), computed as a ratio of Kummer functions."""
    x = np.asarray(x, dtype=float)
    a, b = params.kummer_a, params.kummer_b
    if a == 0:
        return np.zeros_like(x)
    return -2.0 * x * (a / b) * kummer_1f1_ratio(a, b, -x * x)


def _scan_for_nodes(params: ModelParams, grid: Grid):
    if params.phase is Phase.BROKEN or params.kummer_a == 0:
        return
    u = seed_function(params, grid.x)
    flips = np.nonzero(np.sign(u[1:]) != np.sign(u[:-1]))[0]
    zeros = np.nonzero(u == 0)[0]
    if flips.size or zeros.size:
        idx = int(flips[0]) if flips.size else int(zeros[0])
        raise NodeError(float(grid.x[idx]), params)


@lru_cache(maxsize=64)
def _superpotential_on_grid(params: ModelParams, grid: Grid) -> np.ndarray:
    _scan_for_nodes(params, grid)
    x = grid.x
    w = x + (params.gamma_eff + 1.0) / x + seed_log_derivative(params, x)
    w.setflags(write=False)
    return w


def susy_potential(params: ModelParams, x) -> np.ndarray:
    """W(x) = x + (gamma_eff + 1)/x + u'/u."""
    x = np.asarray(x, dtype=float)
    if params.phase is Phase.UNBROKEN and params.kummer_a != 0:
        u = np.atleast_1d(seed_function(params, x))
        if np.any(u == 0):
            raise NodeError(float(np.atleast_1d(x)[np.argmax(u == 0)]), params)
    return x + (params.gamma_eff + 1.0) / x + seed_log_derivative(params, x)


def potential_plus(params: ModelParams, x) -> np.ndarray:
    g = params.gamma_eff
    x = np.asarray(x, dtype=float)
    return x * x / 2.0 + g * (g + 1.0) / (2.0 * x * x) + params.epsilon + g + 0.5


def potential_minus(params: ModelParams, x) -> np.ndarray:
    """Closed form of V-; equals (W^2 - W')/2 by the Kummer equation."""
    g = params.gamma_eff
    x = np.asarray(x, dtype=float)
    r = seed_log_derivative(params, x)
    return (x * x / 2.0 + (g + 1.0) * (g + 2.0) / (2.0 * x * x) + g - params.epsilon + 1.5
            + r * (2.0 * x + 2.0 * (g + 1.0) / x + r))


def potential(params: ModelParams, sector: Union[str, Sector], x) -> np.ndarray:
    return potential_plus(params, x) if Sector.parse(sector) is Sector.PLUS else potential_minus(params, x)


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------

def energy(params: ModelParams, n: int) -> float:
    """Level n of H- (and of H+ in the broken phase)."""
    if n < 0:
        raise ValueError(f"level must be non-negative, got {n}")
    if params.phase is Phase.BROKEN:
        return 2.0 * n + 2.0 * params.gamma + 2.0 + params.epsilon
    if n == 0:
        return 0.0
    return 2.0 * (n - 1) + 1.0 + params.epsilon


def energy_plus(params: ModelParams, n: int) -> float:
    """Level n of H+; in the unbroken phase H+ misses the zero mode."""
    return energy(params, n) if params.phase is Phase.BROKEN else energy(params, n + 1)


def working_grid(params: ModelParams, n_max: int, x_min: float = 1e-4, n_points: int = 8001,
                 tail_margin: float = 12.0) -> Grid:
    return default_grid(energy(params, n_max), x_min=x_min, n_points=n_points, tail_margin=tail_margin)


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

def oscillator_state(angular: float, n: int, grid: Grid) -> np.ndarray:
    """Normalised radial oscillator level x^{l+1} e^{-x^2/2} L_n^{l+1/2}(x^2)."""
    x = grid.x
    log_norm = 0.5 * (math.log(2.0) + gammaln(n + 1) - gammaln(n + angular + 1.5))
    envelope = np.exp((angular + 1.0) * np.log(x) - x * x / 2.0 + log_norm)
    return envelope * laguerre(n, angular + 0.5, x * x)


def _warn_on_tail(psi: WaveFunction):
    if psi.tail_ratio() > 1e-8:
        logger.warning("%s has not decayed at x_max=%g (tail ratio %.2e)",
                       psi.label, psi.grid.x_max, psi.tail_ratio())


def eigenfunction_plus(params: ModelParams, n: int, grid: Grid) -> WaveFunction:
    psi = WaveFunction(grid, oscillator_state(params.plus_angular, n, grid),
                       WaveLabel(params.phase.value, "+", n))
    _warn_on_tail(psi)
    return psi


def zero_mode(params: ModelParams, grid: Grid) -> WaveFunction:
    """Unbroken-phase ground state of H-: x^{gamma+1} e^{-x^2/2} / u."""
    if params.phase is not Phase.UNBROKEN:
        raise ValueError("a normalisable zero mode exists only in the unbroken phase")
    _scan_for_nodes(params, grid)
    x = grid.x
    u = seed_function(params, x)
    raw = np.exp((params.gamma + 1.0) * np.log(x) - x * x / 2.0) / u
    raw = raw / math.sqrt(integrate(raw * raw, grid))
    psi = WaveFunction(grid, raw, WaveLabel(params.phase.value, "-", 0))
    _warn_on_tail(psi)
    return psi


def eigenfunction_minus(params: ModelParams, n: int, grid: Grid) -> WaveFunction:
    """psi-_n = A^dagger psi+ / sqrt(E_n), renormalised on the grid."""
    label = WaveLabel(params.phase.value, "-", n)
    if params.phase is Phase.UNBROKEN:
        if n == 0:
            return zero_mode(params, grid)
        source = eigenfunction_plus(params, n - 1, grid)
    else:
        source = eigenfunction_plus(params, n, grid)

    raw = apply_A(params, source, dagger=True)
    pre = norm(raw)
    expected = math.sqrt(energy(params, n))
    if abs(pre / expected - 1.0) > 1e-3:
        logger.warning("%s: |A^dagger psi+| = %.8g differs from sqrt(E) = %.8g", label, pre, expected)
    psi = WaveFunction(grid, raw.values / pre, label)
    _warn_on_tail(psi)
    return psi


def eigenfunction(params: ModelParams, sector: Union[str, Sector], n: int, grid: Grid) -> WaveFunction:
    if Sector.parse(sector) is Sector.PLUS:
        return eigenfunction_plus(params, n, grid)
    return eigenfunction_minus(params, n, grid)


def eigenfunction_minus_closed_form(params: ModelParams, n: int, grid: Grid) -> WaveFunction:
    """Broken-phase psi-_n written through two Laguerre polynomials."""
    if params.phase is not Phase.BROKEN:
        raise ValueError("closed-form psi- is available for the broken phase only")
    g, eps = params.gamma, params.epsilon
    x = grid.x
    y = x * x
    log_norm = 0.5 * (math.log(2.0) + gammaln(n + 1) - math.log(n + g + 1.0 + eps / 2.0)
                      - gammaln(n + g + 1.5))
    envelope = np.exp((g + 2.0) * np.log(x) - y / 2.0 + log_norm)
    r = seed_log_derivative(params, x)
    values = envelope * (laguerre(n, g + 1.5, y) + r / (2.0 * x) * laguerre(n, g + 0.5, y))
    return WaveFunction(grid, values, WaveLabel(params.phase.value, "-", n))


# ---------------------------------------------------------------------------
# Operators on sampled functions
# ---------------------------------------------------------------------------

def apply_A(params: ModelParams, psi: WaveFunction, dagger: bool = False) -> WaveFunction:
    """A = (d/dx + W)/sqrt(2), A^dagger = (-d/dx + W)/sqrt(2)."""
    w = _superpotential_on_grid(params, psi.grid)
    d = derivative(psi, 1).values
    sign = -1.0 if dagger else 1.0
    return psi.with_values((sign * d + w * psi.values) / math.sqrt(2.0))


def apply_c(params: ModelParams, psi: WaveFunction, dagger: bool = False,
            angular: Optional[float] = None) -> WaveFunction:
    """Oscillator ladder c = (d/dx + x)^2/2 - l(l+1)/(2x^2); c^dagger flips d/dx.

    ``angular`` defaults to l = gamma_eff + 1.
    """
    l = params.gamma_eff + 1.0 if angular is None else angular
    x = psi.grid.x
    sign = -1.0 if dagger else 1.0

    def shift(values: np.ndarray) -> np.ndarray:
        return sign * derivative(psi.with_values(values), 1).values + x * values

    twice = shift(shift(psi.values))
    return psi.with_values(0.5 * twice - l * (l + 1.0) / (2.0 * x * x) * psi.values)


def apply_D(params: ModelParams, psi: WaveFunction, dagger: bool = False) -> WaveFunction:
    """D = A^dagger c A lowers H-; D^dagger = A^dagger c^dagger A raises it.

    The ladder c acts on the H+ tower, whose centrifugal coefficient is
    gamma_eff (gamma_eff + 1).
    Samples below quad.INTERIOR_X_LOWER carry stencil error amplified by
    the 1/x terms; compare results through quad.interior_mask.
    """
    lowered = apply_A(params, psi, dagger=False)
    laddered = apply_c(params, lowered, dagger=dagger, angular=params.gamma_eff)
    return apply_A(params, laddered, dagger=True)


def apply_H(params: ModelParams, psi: WaveFunction, sector: Union[str, Sector]) -> WaveFunction:
    """-psi''/2 + V psi."""
    v = potential(params, sector, psi.grid.x)
    return psi.with_values(-0.5 * derivative(psi, 2).values + v * psi.values)


def eigen_residual(params: ModelParams, psi: WaveFunction, sector: Union[str, Sector],
                   level_energy: float, interior: float = 0.9) -> float:
    """||(H - E) psi|| on the grid interior, relative to max(E, 1)."""
    h_psi = apply_H(params, psi, sector)
    residual = h_psi.with_values(h_psi.values - level_energy * psi.values)
    return norm(residual, interior_mask(psi.grid, upper_fraction=interior)) / max(level_energy, 1.0)
