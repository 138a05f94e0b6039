#!/usr/bin/env python3
"""
CES Toolkit Command Line
Subcommands: spectrum, wavefunction, coherent, density, verify.

Data goes to stdout (or --out); logs and validator status lines go to stderr.
Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

import coherent
import measure
import model
from ces_config import ConfigError, accuracy_from, load_defaults, log_file_from, log_level_from
from model import ModelParams, Phase, Sector
from quad import Grid, norm
from specfun import Accuracy
from system_validator import SUITES, CESValidator

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"
SWEEP_KEYS = ("gamma", "epsilon")


class UsageError(ValueError):
    """Flag combination the parser cannot reject on its own."""


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    fmt: str
    out: Optional[Path]
    acc: Accuracy
    levels: int
    level_cap: int
    x_min: float
    n_points: int
    tail_margin: float
    rel_tail: float
    n_cap: int
    n_jobs: int

    def __post_init__(self):
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.fmt!r}")
        if self.levels < 1:
            raise UsageError(f"--levels must be >= 1, got {self.levels}")

    def grid_for(self, n: int) -> Grid:
        return model.working_grid(self.params, n, x_min=self.x_min, n_points=self.n_points,
                                  tail_margin=self.tail_margin)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def canonical_json(value: Any) -> str:
    """Sorted keys, no whitespace, floats as %.12e, complex as {"im", "re"}."""
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return format(v, ".12e") if math.isfinite(v) else "null"
    if isinstance(value, (complex, np.complexfloating)):
        return canonical_json({"im": value.imag, "re": value.real})
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = sorted((str(k), v) for k, v in value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{canonical_json(v)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def render_csv(frame: pd.DataFrame, comments: Sequence[str] = ()) -> str:
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT)
    footer = "".join(f"# {line}\n" for line in comments)
    return body + footer


def emit(text: str, out: Optional[Path]):
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)


def params_record(params: ModelParams) -> Dict[str, Any]:
    return {"gamma": params.gamma, "epsilon": params.epsilon, "phase": params.phase.value}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig) -> int:
    levels = list(range(cfg.levels))
    energies = [model.energy(cfg.params, n) for n in levels]
    if cfg.fmt == "json":
        emit(canonical_json({"params": params_record(cfg.params), "n": levels, "energy": energies}), cfg.out)
    else:
        emit(render_csv(pd.DataFrame({"n": levels, "energy": energies})), cfg.out)
    return 0


def cmd_wavefunction(cfg: RunConfig, sector: str, n: int) -> int:
    if not 0 <= n <= cfg.level_cap:
        raise UsageError(f"level n={n} outside [0, {cfg.level_cap}]")
    sector = Sector.parse(sector)
    grid = cfg.grid_for(n + 1)
    psi = model.eigenfunction(cfg.params, sector, n, grid)
    level_energy = (model.energy_plus(cfg.params, n) if sector is Sector.PLUS
                    else model.energy(cfg.params, n))
    psi_norm = norm(psi)
    if cfg.fmt == "json":
        emit(canonical_json({
            "params": params_record(cfg.params), "sector": sector.value, "n": n,
            "energy": level_energy, "norm": psi_norm,
            "x": grid.x, "psi": psi.values,
        }), cfg.out)
    else:
        frame = pd.DataFrame({"x": grid.x, "psi": psi.values})
        emit(render_csv(frame, [f"sector={sector.value} n={n} energy={level_energy:.12e} norm={psi_norm:.12e}"]),
             cfg.out)
    return 0


def coherent_record(cfg: RunConfig, mu: complex) -> Dict[str, Any]:
    state = coherent.coherent_coeffs(cfg.params, mu, rel_tail=cfg.rel_tail, n_cap=cfg.n_cap)
    lhs, rhs = coherent.uncertainty_product(state)
    return {
        "params": params_record(cfg.params),
        "mu": complex(mu),
        "N": state.N,
        "c0": state.c0,
        "coeffs": state.coeffs.real,
        "coeffs_imag": state.coeffs.imag,
        "truncation_tail": state.truncation_tail,
        "residual": coherent.eigenvalue_residual(state),
        "overlap_self": coherent.overlap(state, state).real,
        "uncertainty_lhs": lhs,
        "uncertainty_rhs": rhs,
        "uncertainty_equal": bool(abs(lhs - rhs) <= 1e-8 * max(rhs, 1e-300)),
        "F": coherent.phi_mean(state),
    }


def cmd_coherent(cfg: RunConfig, mu_re: float, mu_im: float) -> int:
    record = coherent_record(cfg, complex(mu_re, mu_im))
    if cfg.fmt == "json":
        emit(canonical_json(record), cfg.out)
    else:
        frame = pd.DataFrame({"n": np.arange(record["N"]), "coeff_re": record["coeffs"],
                              "coeff_im": record["coeffs_imag"]})
        scalars = ("c0", "residual", "uncertainty_lhs", "uncertainty_rhs", "F", "truncation_tail")
        comments = [f"{k}={record[k]:.12e}" for k in scalars]
        comments.append(f"uncertainty_equal={str(record['uncertainty_equal']).lower()}")
        emit(render_csv(frame, comments), cfg.out)
    return 0


def parse_sweep(spec: Optional[str]) -> Tuple[Optional[str], List[float]]:
    if spec is None:
        return None, []
    key, sep, values = spec.partition("=")
    key = key.strip()
    if not sep or key not in SWEEP_KEYS:
        raise UsageError(f"--sweep expects gamma=a,b,... or epsilon=a,b,...; got {spec!r}")
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--sweep values must be numbers; got {values!r}") from None
    if not parsed:
        raise UsageError("--sweep needs at least one value")
    return key, parsed


def _density_curve(params: ModelParams, x_max: float, samples: int, acc: Accuracy):
    profile = measure.radial_density_profile(params, x_max, samples, acc)
    return profile, measure.sigma_normalization(params, acc)


def cmd_density(cfg: RunConfig, x_max: float, samples: int, sweep: Optional[str]) -> int:
    if not x_max > 0:
        raise UsageError(f"--x-max must be positive, got {x_max}")
    key, values = parse_sweep(sweep)
    if key is None:
        variants = [(None, cfg.params)]
    else:
        variants = [(f"{key}={v:g}", replace(cfg.params, **{key: v})) for v in values]

    logger.info("Sampling %d density curve(s) on (0, %g] with %d points", len(variants), x_max, samples)
    curves = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(
        delayed(_density_curve)(p, x_max, samples, cfg.acc) for _, p in variants)

    if cfg.fmt == "json":
        emit(canonical_json({
            "params": params_record(cfg.params),
            "x": curves[0][0].x,
            "curves": [{"label": label or "", "params": params_record(p), "sigma": prof.sigma,
                        "radial_f": prof.radial, "integral_sigma": total}
                       for (label, p), (prof, total) in zip(variants, curves)],
        }), cfg.out)
        return 0

    columns: Dict[str, np.ndarray] = {"x": curves[0][0].x}
    comments = []
    for (label, _), (prof, total) in zip(variants, curves):
        suffix = f"[{label}]" if label else ""
        columns[f"sigma{suffix}"] = prof.sigma
        columns[f"radial_f{suffix}"] = prof.radial
        comments.append(f"integral_sigma{suffix}={total:.12e}")
    emit(render_csv(pd.DataFrame(columns), comments), cfg.out)
    return 0


def cmd_verify(cfg: RunConfig, suite: str, as_json: bool, color: bool) -> int:
    validator = CESValidator(cfg.params, cfg.acc, rel_tail=cfg.rel_tail, n_points=cfg.n_points, color=color)
    results = validator.run(None if suite == "all" else [suite])
    if as_json or cfg.out is not None or cfg.fmt == "json":
        emit(canonical_json(results), cfg.out)
    return 0 if results["overall_status"] == "passed" else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser(defaults: Dict[str, Any]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file overriding config/ces_defaults.json")
    common.add_argument("--gamma", type=float, default=defaults["model"]["gamma"], help="Angular parameter gamma >= 0")
    common.add_argument("--epsilon", type=float, default=defaults["model"]["epsilon"], help="Extension parameter epsilon")
    common.add_argument("--phase", choices=[p.value for p in Phase], default=defaults["model"]["phase"],
                        help="SUSY phase")
    common.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv", help="Output format")
    common.add_argument("--out", type=Path, help="Write output to this file instead of stdout")
    common.add_argument("--levels", type=int, default=5, help="Number of levels (spectrum)")
    common.add_argument("--x-min", type=float, default=defaults["grid"]["x_min"], help="Grid start")
    common.add_argument("--n-points", type=int, default=defaults["grid"]["n_points"], help="Grid points")
    common.add_argument("--rel-tol", type=float, help="Series/contour relative tolerance")
    common.add_argument("--n-jobs", type=int, default=defaults["parallel"]["n_jobs"], help="Parallel workers")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    common.add_argument("--log-file", type=Path, default=log_file_from(defaults), help="Also log to this file")

    parser = argparse.ArgumentParser(
        prog="ces",
        description="CES partners of the radial oscillator and their nonlinear coherent states")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common], help="Closed-form energies of H-")

    wf = sub.add_parser("wavefunction", parents=[common], help="Sampled partner eigenfunction")
    wf.add_argument("--sector", choices=["+", "-", "plus", "minus"], default="-", help="Partner sector")
    wf.add_argument("--n", type=int, default=0, help="Level index")

    coh = sub.add_parser("coherent", parents=[common], help="Coherent-state diagnostics")
    coh.add_argument("--mu-re", type=float, default=0.0, help="Re(mu)")
    coh.add_argument("--mu-im", type=float, default=0.0, help="Im(mu)")
    coh.add_argument("--rel-tail", type=float, default=defaults["coherent"]["rel_tail"], help="Truncation tail")

    den = sub.add_parser("density", parents=[common], help="Measure sigma and radial density")
    den.add_argument("--x-max", type=float, default=defaults["density"]["x_max"], help="Largest x sampled")
    den.add_argument("--samples", type=int, default=defaults["density"]["samples"], help="Sample count")
    den.add_argument("--sweep", help="gamma=a,b,... or epsilon=a,b,...")

    ver = sub.add_parser("verify", parents=[common], help="Run invariant suites")
    ver.add_argument("--suite", choices=["all", *SUITES], default="all", help="Suite to run")
    ver.add_argument("--json", action="store_true", help="Print the JSON report to stdout")
    ver.add_argument("--no-color", action="store_true", help="Plain status lines")
    return parser


def configure_logging(verbose: bool, quiet: bool, log_file: Optional[Path], default_level: int = logging.INFO):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else default_level
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s",
                        handlers=handlers, force=True)


def _config_path(argv: Sequence[str]) -> Optional[Path]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    return known.config


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        defaults = load_defaults(_config_path(argv))
        default_level = log_level_from(defaults)
    except ConfigError as e:
        print(f"ces: error: {e}", file=sys.stderr)
        return 2

    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet, args.log_file, default_level)

    try:
        params = ModelParams(args.gamma, args.epsilon, args.phase)
        cfg = RunConfig(
            params=params,
            fmt=args.fmt,
            out=args.out,
            acc=accuracy_from(defaults, args.rel_tol),
            levels=args.levels,
            level_cap=int(defaults["model"]["level_cap"]),
            x_min=args.x_min,
            n_points=args.n_points,
            tail_margin=float(defaults["grid"]["tail_margin"]),
            rel_tail=getattr(args, "rel_tail", defaults["coherent"]["rel_tail"]),
            n_cap=int(defaults["coherent"]["n_cap"]),
            n_jobs=args.n_jobs,
        )
        logger.debug("Run config: %s", cfg)

        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "wavefunction":
            return cmd_wavefunction(cfg, args.sector, args.n)
        if args.command == "coherent":
            return cmd_coherent(cfg, args.mu_re, args.mu_im)
        if args.command == "density":
            return cmd_density(cfg, args.x_max, args.samples, args.sweep)
        return cmd_verify(cfg, args.suite, args.json, color=not args.no_color)
    except (ValueError, ArithmeticError, RuntimeError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"ces: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
