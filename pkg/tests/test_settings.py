import json
import logging
import os

import pytest
from pydantic import ValidationError

from log_setup import LOG_FILE, setup_file_logging
from settings import DEFAULTS, DEFAULTS_FILE, Settings, get_settings, reload_settings


def test_defaults_file_matches_builtin_defaults():
    with open(DEFAULTS_FILE) as f:
        assert json.load(f) == DEFAULTS


def test_environment_overrides_file(monkeypatch):
    monkeypatch.setenv("QPK_MAX_CARRIER", "7")
    monkeypatch.setenv("QPK_LOG_LEVEL", "debug")
    try:
        settings = reload_settings()
        assert settings.max_carrier == 7
        assert settings.log_level == "DEBUG"
        assert get_settings() is settings
    finally:
        monkeypatch.delenv("QPK_MAX_CARRIER")
        monkeypatch.delenv("QPK_LOG_LEVEL")
        reload_settings()


def test_validation_rejects_bad_values():
    with pytest.raises(ValidationError):
        Settings(log_level="LOUD")
    with pytest.raises(ValidationError):
        Settings(default_depth=0)


def test_file_logging(tmp_path):
    log_dir = tmp_path / "logs"
    path = setup_file_logging(str(log_dir), "INFO")
    assert path == os.path.join(str(log_dir), LOG_FILE)
    logging.getLogger("SettingsTest").warning("hello")
    for handler in logging.getLogger().handlers:
        handler.flush()
    with open(path) as f:
        assert "SettingsTest - WARNING - hello" in f.read()
    # a second call reuses the handler
    setup_file_logging(str(log_dir), "INFO")
    handlers = [h for h in logging.getLogger().handlers
                if isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(path)]
    assert len(handlers) == 1
    logging.getLogger().removeHandler(handlers[0])
    handlers[0].close()
