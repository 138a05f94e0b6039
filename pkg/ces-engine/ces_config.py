#!/usr/bin/env python3
"""
CES Toolkit Configuration
Loads layered defaults: built-in values, then config/ces_defaults.json,
then an optional user file passed with --config.
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from model import LEVEL_CAP
from specfun import Accuracy

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent.parent / "config" / "ces_defaults.json"

BUILTIN_DEFAULTS: Dict[str, Any] = {
    "model": {"gamma": 1.0, "epsilon": 1.0, "phase": "broken", "level_cap": LEVEL_CAP},
    "grid": {"x_min": 1e-4, "n_points": 8001, "tail_margin": 12.0},
    "accuracy": {"rel_tol": 1e-12, "max_terms": 10000, "contour_half_width": 4.0,
                 "contour_abscissa": None},
    "coherent": {"rel_tail": 1e-14, "n_cap": 4096},
    "density": {"x_max": 200.0, "samples": 201},
    "parallel": {"n_jobs": 1},
    "logging": {"level": "INFO", "file": None},
}


class ConfigError(ValueError):
    """Unreadable or malformed configuration file."""


def _merge(base: Dict[str, Any], override: Dict[str, Any], source: str) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for section, values in override.items():
        if section not in merged:
            logger.warning("Ignoring unknown config section '%s' in %s", section, source)
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"config section '{section}' in {source} must be an object")
        for key, value in values.items():
            if key not in merged[section]:
                logger.warning("Ignoring unknown config key '%s.%s' in %s", section, key, source)
                continue
            merged[section][key] = value
    return merged


def _read(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return data


def load_defaults(path: Optional[Path] = None,
                  defaults_file: Path = DEFAULT_CONFIG_FILE) -> Dict[str, Any]:
    config = copy.deepcopy(BUILTIN_DEFAULTS)
    if defaults_file.exists():
        config = _merge(config, _read(defaults_file), str(defaults_file))
    else:
        logger.debug("No defaults file at %s, using built-in values", defaults_file)
    if path is not None:
        config = _merge(config, _read(Path(path)), str(path))
    return config


def accuracy_from(config: Dict[str, Any], rel_tol: Optional[float] = None) -> Accuracy:
    acc = config["accuracy"]
    abscissa = acc.get("contour_abscissa")
    return Accuracy(
        rel_tol=float(rel_tol if rel_tol is not None else acc["rel_tol"]),
        max_terms=int(acc["max_terms"]),
        contour_half_width=float(acc["contour_half_width"]),
        contour_abscissa=None if abscissa is None else float(abscissa),
    )


def log_level_from(config: Dict[str, Any]) -> int:
    name = str(config["logging"]["level"]).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"unknown logging level '{config['logging']['level']}'")
    return level


def log_file_from(config: Dict[str, Any]) -> Optional[Path]:
    path = config["logging"]["file"]
    return None if path in (None, "") else Path(path)
