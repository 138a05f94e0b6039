#!/usr/bin/env python3
"""
CES System Validator v1.0
=========================
Runs the numerical invariants of the toolkit as named suites and reports a
pass/fail verdict per check.

Suites:
- algebra: deformed-algebra relations, Casimir, ladder products
- wavefunction: partner eigenfunctions, potentials and D^dagger on the grid
- moments: Stieltjes moments of sigma and the resolution of unity
- uncertainty: coherent-state eigen-equation, overlaps and minimum uncertainty

Author: CES Toolkit v1.0
Date: October 2026
"""

import logging
import sys
import time
from datetime import datetime
from typing import Callable, Dict, List, Optional

import numpy as np

import coherent
import fock
import measure
import model
from model import ModelParams, Phase
from quad import WaveFunction, derivative, inner, interior_mask, norm
from specfun import DEFAULT_ACCURACY, Accuracy

logger = logging.getLogger(__name__)

SUITES = ("algebra", "wavefunction", "moments", "uncertainty")

ACCEPTANCE_SETS = (
    ModelParams(0.0, 1.0),
    ModelParams(1.0, 1.0),
    ModelParams(1.0, 3.0),
    ModelParams(2.5, -3.5),
)

COHERENT_RADII = (0.1, 1.0, 5.0, 20.0)


class CESValidator:
    """
    Invariant checker for one parameter set (plus the fixed acceptance sets
    for the algebra suite)
    """

    def __init__(self, params: ModelParams, acc: Accuracy = DEFAULT_ACCURACY,
                 rel_tail: float = 1e-14, n_points: int = 8001, color: bool = True):
        self.params = params
        self.acc = acc
        self.rel_tail = rel_tail
        self.n_points = n_points
        self.checks: List[Dict] = []

        self.colors = {
            'red': '\033[0;31m',
            'green': '\033[0;32m',
            'yellow': '\033[1;33m',
            'blue': '\033[0;34m',
            'cyan': '\033[0;36m',
            'nc': '\033[0m'
        }
        if not color:
            self.colors = {k: '' for k in self.colors}

    def print_colored(self, message: str, color: str = 'nc'):
        """Print colored message to stderr (stdout carries the report)"""
        print(f"{self.colors.get(color, self.colors['nc'])}{message}{self.colors['nc']}", file=sys.stderr)

    def print_header(self, title: str):
        self.print_colored(f"\n{'='*60}", 'cyan')
        self.print_colored(f"🔬 {title}", 'cyan')
        self.print_colored(f"{'='*60}", 'cyan')

    def record(self, name: str, value: float, tolerance: float, passed: Optional[bool] = None) -> bool:
        value = float(value)
        ok = bool(value <= tolerance) if passed is None else bool(passed)
        self.checks.append({'name': name, 'value': value, 'tolerance': tolerance, 'passed': ok})
        marker, color = ("✅", 'green') if ok else ("❌", 'red')
        self.print_colored(f"{marker} {name}: {value:.3e} (tol {tolerance:.0e})", color)
        return ok

    def guarded(self, name: str, check: Callable[[], None]):
        """Run a check; an exception becomes a failed entry instead of aborting the suite"""
        try:
            check()
        except Exception as e:
            logger.error("Check '%s' raised %s: %s", name, type(e).__name__, e)
            self.record(f"{name} ({type(e).__name__})", float('inf'), 0.0, passed=False)

    # ------------------------------------------------------------------
    # Suites
    # ------------------------------------------------------------------

    def check_algebra(self):
        param_sets = [self.params] + [p for p in ACCEPTANCE_SETS if p != self.params]
        for p in param_sets:
            tag = p.describe()

            def relations(p=p, tag=tag):
                for relation, value in fock.algebra_residuals(p, 12).items():
                    self.record(f"{tag} {relation}", value, 1e-9)

            def casimir(p=p, tag=tag):
                energies = np.array([model.energy(p, n) for n in range(11)])
                scale = max(float(np.max(np.abs(fock.psi(p, energies)))), 1.0)
                self.record(f"{tag} Casimir", fock.casimir_residual(p, 12) / scale, 1e-9)

            def shift_identity(p=p, tag=tag):
                lhs = fock.shifted_difference_coeffs(p)
                rhs = fock.structure_function_coeffs(p)
                scale = float(np.max(np.abs(rhs)))
                self.record(f"{tag} Psi(H)-Psi(H-2)=Phi(H)", float(np.max(np.abs(lhs - rhs))) / scale, 1e-12)

            def ladder_products(p=p, tag=tag):
                worst = max(abs(fock.normalized_state_coeff(p, n) ** 2 * measure.moment(p, n) - 1.0)
                            for n in range(1, 9))
                self.record(f"{tag} 1/prod f_i^2 = M_n", worst, 1e-10)
                self.record(f"{tag} (D_dag)^5 ground", coherent.raise_power_check(p, 5), 1e-12)

            for name, check in (("relations", relations), ("casimir", casimir),
                                ("shift identity", shift_identity), ("ladder products", ladder_products)):
                self.guarded(f"{tag} {name}", check)

    def check_wavefunction(self):
        p = self.params
        n_max = 8 if p.phase is Phase.BROKEN else 6
        grid = model.working_grid(p, n_max + 1, n_points=self.n_points)
        interior = interior_mask(grid)

        def orthonormality():
            states = [model.eigenfunction_minus(p, n, grid) for n in range(n_max + 1)]
            gram = np.array([[inner(a, b) for b in states] for a in states])
            self.record(f"psi-_n orthonormal (n<={n_max})", float(np.max(np.abs(gram - np.eye(len(states))))), 1e-6)

        def partner_potential():
            w = WaveFunction(grid, model.susy_potential(p, grid.x))
            identity = model.potential_plus(p, grid.x) - derivative(w, 1).values
            closed = model.potential_minus(p, grid.x)
            mask = interior & (grid.x > 0.5)
            dev = np.max(np.abs(identity[mask] - closed[mask]) / np.maximum(np.abs(closed[mask]), 1.0))
            self.record("V- closed form = V+ - W'", float(dev), 1e-6)

        def raising_elements():
            first = 0 if p.phase is Phase.BROKEN else 1
            for n in range(first, first + 5):
                lower = model.eigenfunction_minus(p, n, grid)
                upper = model.eigenfunction_minus(p, n + 1, grid)
                element = inner(upper, model.apply_D(p, lower, dagger=True), interior)
                expected = fock.ladder_element(p, n + 1)
                self.record(f"<{n + 1}|D_dag|{n}>", abs(element - expected) / abs(expected), 1e-4)

        def ground_state():
            if p.phase is Phase.BROKEN:
                ground = model.eigenfunction_minus(p, 0, grid)
                lowered = norm(model.apply_D(p, ground), interior) / abs(fock.ladder_element(p, 1))
                self.record("D psi-_0 = 0", lowered, 1e-4)
                psi = model.eigenfunction_minus(p, 3, grid)
                self.record("H- psi-_3 = E_3 psi-_3", model.eigen_residual(p, psi, '-', model.energy(p, 3)), 1e-5)
                closed = model.eigenfunction_minus_closed_form(p, 3, grid)
                self.record("psi-_3 closed form", float(np.max(np.abs(closed.values - psi.values))), 1e-6)
            else:
                zero = model.zero_mode(p, grid)
                self.record("A psi-_0 = 0", norm(model.apply_A(p, zero), interior), 1e-5)
                scale = abs(fock.ladder_element(p, 2))
                self.record("D psi-_0 = 0", norm(model.apply_D(p, zero), interior) / scale, 1e-4)
                self.record("D_dag psi-_0 = 0", norm(model.apply_D(p, zero, dagger=True), interior) / scale, 1e-4)

        for name, check in (("orthonormality", orthonormality), ("partner potential", partner_potential),
                            ("raising elements", raising_elements), ("ground state", ground_state)):
            self.guarded(name, check)

    def check_moments(self):
        p = self.params

        def moments():
            report = measure.verify_moments(p, 4, self.acc)
            for n, err in zip(report.orders, report.rel_errors):
                self.record(f"moment M_{n}", err, 1e-5)

        def resolution():
            offset = 0 if p.phase is Phase.BROKEN else 1
            report = measure.resolution_of_unity_check(p, 5 + offset, self.acc)
            self.record("resolution of unity (N=5)", report.max_deviation, 1e-5)

        def hankel():
            ok = measure.hankel_positivity(p, 6)
            self.record("Hankel positivity", 0.0 if ok else 1.0, 0.5, passed=ok)

        for name, check in (("moments", moments), ("resolution", resolution), ("hankel", hankel)):
            self.guarded(name, check)

    def check_uncertainty(self):
        p = self.params

        def per_radius(mu):
            state = coherent.coherent_coeffs(p, mu, rel_tail=self.rel_tail)
            self.record(f"|mu|={mu:g} normalisation", abs(state.norm_squared() - 1.0), 1e-12)
            self.record(f"|mu|={mu:g} (D-mu)|mu>", coherent.eigenvalue_residual(state) / max(1.0, mu), 1e-10)
            lhs, rhs = coherent.uncertainty_product(state)
            self.record(f"|mu|={mu:g} minimum uncertainty", abs(lhs - rhs) / rhs, 1e-8)

        def overlaps():
            a = coherent.coherent_coeffs(p, 1.0, rel_tail=self.rel_tail)
            b = coherent.coherent_coeffs(p, 2.0, rel_tail=self.rel_tail)
            closed = coherent.overlap_closed_form(a, b)
            self.record("<1|2> closed form", abs(coherent.overlap(a, b) - closed) / abs(closed), 1e-10)

        for mu in COHERENT_RADII:
            self.guarded(f"|mu|={mu:g}", lambda mu=mu: per_radius(mu))
        self.guarded("overlaps", overlaps)

    # ------------------------------------------------------------------

    def run(self, suites: Optional[List[str]] = None) -> Dict:
        suites = list(SUITES) if suites in (None, ["all"]) else suites
        runners = {
            'algebra': self.check_algebra,
            'wavefunction': self.check_wavefunction,
            'moments': self.check_moments,
            'uncertainty': self.check_uncertainty,
        }
        results = {
            'timestamp': datetime.now().isoformat(),
            'params': {'gamma': self.params.gamma, 'epsilon': self.params.epsilon,
                       'phase': self.params.phase.value},
            'suites': {},
            'overall_status': 'unknown',
        }
        for suite in suites:
            self.print_header(f"Suite: {suite}")
            self.checks = []
            start = time.time()
            runners[suite]()
            passed = all(c['passed'] for c in self.checks)
            results['suites'][suite] = {
                'passed': passed,
                'seconds': round(time.time() - start, 3),
                'checks': self.checks,
            }
            self.print_colored(f"{'✅' if passed else '❌'} {suite}: {sum(c['passed'] for c in self.checks)}"
                               f"/{len(self.checks)} checks passed", 'green' if passed else 'red')

        all_passed = all(s['passed'] for s in results['suites'].values())
        results['overall_status'] = 'passed' if all_passed else 'failed'
        if all_passed:
            self.print_colored("\n🎉 Overall Status: PASSED", 'green')
        else:
            self.print_colored("\n❌ Overall Status: FAILED", 'red')
        return results
