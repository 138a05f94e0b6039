#!/usr/bin/env python3
"""
CES Toolkit - Radial Grid Quadrature
Uniform radial grids on [x_min, x_max], sampled wave functions, inner
products and fourth-order finite-difference derivatives.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import integrate as sp_integrate

logger = logging.getLogger(__name__)

# Lower edge of the operator-check interior
INTERIOR_X_LOWER = 0.05


class GridMismatchError(ValueError):
    """Two sampled functions live on different grids."""


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not 0 < self.x_min < self.x_max:
            raise ValueError(f"grid needs 0 < x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_points < 16:
            raise ValueError(f"grid needs at least 16 points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        pts = np.linspace(self.x_min, self.x_max, self.n_points)
        pts.setflags(write=False)
        return pts


def default_grid(max_energy: float, x_min: float = 1e-4, n_points: int = 8001,
                 tail_margin: float = 12.0) -> Grid:
    """Grid reaching ``tail_margin`` past the classical turning point sqrt(2E)."""
    return Grid(x_min, tail_margin + float(np.sqrt(2.0 * max(max_energy, 0.0))), n_points)


@dataclass(frozen=True)
class WaveLabel:
    phase: str
    sector: str
    n: int

    def __str__(self):
        return f"{self.phase}:psi{self.sector}_{self.n}"


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    values: np.ndarray
    label: Optional[WaveLabel] = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"{vals.shape[0] if vals.ndim else 0} samples for a {self.grid.n_points}-point grid")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray, label: Optional[WaveLabel] = None) -> "WaveFunction":
        return WaveFunction(self.grid, values, label)

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values / norm(self), self.label)

    def tail_ratio(self) -> float:
        peak = float(np.max(np.abs(self.values)))
        return abs(float(self.values[-1])) / peak if peak > 0 else 0.0


def _check_samples(f: np.ndarray, grid: Grid) -> np.ndarray:
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise GridMismatchError(f"{f.shape} samples for a {grid.n_points}-point grid")
    return f


def integrate(f, grid: Grid) -> float:
    """Composite Simpson on an odd point count, trapezoid otherwise."""
    f = _check_samples(f, grid)
    if grid.n_points % 2 == 1:
        return float(sp_integrate.simpson(f, dx=grid.spacing))
    return float(sp_integrate.trapezoid(f, dx=grid.spacing))


def interior_mask(grid: Grid, x_lower: float = INTERIOR_X_LOWER, upper_fraction: float = 0.9) -> np.ndarray:
    """Samples with x >= x_lower inside the first ``upper_fraction`` of the grid.

    Chained one-sided stencils times the 1/x and 1/x^2 coefficients of the
    ladder operators are unreliable on the first few samples.
    """
    cut = grid.x_min + upper_fraction * (grid.x_max - grid.x_min)
    return (grid.x >= x_lower) & (grid.x <= cut)


def inner(psi: WaveFunction, phi: WaveFunction, mask: Optional[np.ndarray] = None) -> float:
    if psi.grid != phi.grid:
        raise GridMismatchError(f"inner product across grids {psi.grid} and {phi.grid}")
    product = psi.values * phi.values
    if mask is not None:
        product = np.where(_check_samples(mask, psi.grid), product, 0.0)
    return integrate(product, psi.grid)


def norm(psi: WaveFunction, mask: Optional[np.ndarray] = None) -> float:
    return float(np.sqrt(inner(psi, psi, mask)))


def _first_derivative(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return d


def _second_derivative(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    h2 = 12.0 * h * h
    d[2:-2] = (-f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3] - f[:-4]) / h2
    d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / h2
    d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / h2
    d[-1] = (45.0 * f[-1] - 154.0 * f[-2] + 214.0 * f[-3] - 156.0 * f[-4] + 61.0 * f[-5] - 10.0 * f[-6]) / h2
    d[-2] = (10.0 * f[-1] - 15.0 * f[-2] - 4.0 * f[-3] + 14.0 * f[-4] - 6.0 * f[-5] + f[-6]) / h2
    return d


def derivative(psi: WaveFunction, order: int = 1) -> WaveFunction:
    """Fourth-order central differences, one-sided at the two points nearest each end."""
    if order == 1:
        vals = _first_derivative(psi.values, psi.grid.spacing)
    elif order == 2:
        vals = _second_derivative(psi.values, psi.grid.spacing)
    else:
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    return WaveFunction(psi.grid, vals)
