import json
import logging

import pytest

from ces_config import (BUILTIN_DEFAULTS, DEFAULT_CONFIG_FILE, ConfigError, accuracy_from, load_defaults,
                        log_file_from, log_level_from)
from model import LEVEL_CAP


def test_shipped_defaults_match_builtin():
    assert DEFAULT_CONFIG_FILE.exists()
    assert load_defaults() == BUILTIN_DEFAULTS


def test_missing_defaults_file_falls_back(tmp_path):
    config = load_defaults(defaults_file=tmp_path / "absent.json")
    assert config == BUILTIN_DEFAULTS
    assert config is not BUILTIN_DEFAULTS


def test_user_file_overrides(tmp_path):
    user = tmp_path / "user.json"
    user.write_text(json.dumps({"model": {"epsilon": 3.0}, "accuracy": {"rel_tol": 1e-10}}))
    config = load_defaults(user)
    assert config["model"]["epsilon"] == 3.0
    assert config["model"]["gamma"] == BUILTIN_DEFAULTS["model"]["gamma"]
    assert accuracy_from(config).rel_tol == 1e-10


def test_unknown_keys_are_ignored(tmp_path, caplog):
    user = tmp_path / "user.json"
    user.write_text(json.dumps({"model": {"colour": "blue"}, "plotting": {}}))
    with caplog.at_level(logging.WARNING):
        config = load_defaults(user)
    assert "colour" not in config["model"]
    assert "plotting" not in config
    assert "Ignoring unknown config" in caplog.text


@pytest.mark.parametrize("content", ["{oops", "[1, 2]", '{"model": 3}'])
def test_malformed_files(tmp_path, content):
    user = tmp_path / "user.json"
    user.write_text(content)
    with pytest.raises(ConfigError):
        load_defaults(user)


def test_command_line_tolerance_wins():
    acc = accuracy_from(BUILTIN_DEFAULTS, rel_tol=1e-8)
    assert acc.rel_tol == 1e-8
    assert acc.contour_abscissa is None


def test_logging_section_levels(tmp_path):
    user = tmp_path / "user.json"
    user.write_text(json.dumps({"logging": {"level": "warning", "file": str(tmp_path / "ces.log")}}))
    config = load_defaults(user)
    assert log_level_from(config) == logging.WARNING
    assert log_file_from(config) == tmp_path / "ces.log"
    assert log_level_from(BUILTIN_DEFAULTS) == logging.INFO
    assert log_file_from(BUILTIN_DEFAULTS) is None


def test_unknown_logging_level(tmp_path):
    user = tmp_path / "user.json"
    user.write_text(json.dumps({"logging": {"level": "chatty"}}))
    with pytest.raises(ConfigError, match="chatty"):
        log_level_from(load_defaults(user))


def test_level_cap_default_comes_from_model():
    assert BUILTIN_DEFAULTS["model"]["level_cap"] == LEVEL_CAP
