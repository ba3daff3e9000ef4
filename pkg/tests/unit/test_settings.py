"""
Unit tests for the configuration layer
"""

import json

import pytest

from slar.config.settings import Settings, apply_env_overrides, settings, validate_config
from slar.core_engine.errors import ConfigurationError


@pytest.mark.unit
class TestSettings:

    def test_defaults_without_file(self, tmp_path):
        local = Settings(str(tmp_path / "missing.json"))
        assert local.get("cross_approx.gamma") == 0.1
        assert local.get("time_integration.dt_floor") == 1e-6
        assert local.get("nope.missing", "fallback") == "fallback"

    def test_file_is_deep_merged(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"cross_approx": {"gamma": 0.5}}))
        local = Settings(str(path))
        assert local.get("cross_approx.gamma") == 0.5
        assert local.get("cross_approx.r_min") == 1

    def test_set_creates_sections(self, tmp_path):
        local = Settings(str(tmp_path / "missing.json"))
        local.set("custom.section.value", 4)
        assert local.get("custom.section.value") == 4

    def test_save_config(self, tmp_path):
        local = Settings(str(tmp_path / "out" / "config.json"))
        local.set("runtime.threads", 2)
        local.save_config()
        assert json.loads((tmp_path / "out" / "config.json").read_text())["runtime"]["threads"] == 2

    def test_ensure_directories(self, tmp_path):
        dirs = settings.ensure_directories(tmp_path / "run")
        assert set(dirs) == {"output", "checkpoints", "logs"}
        assert all(path.is_dir() for path in dirs.values())


@pytest.mark.unit
class TestValidationAndEnvironment:

    def test_shipped_configuration_is_valid(self):
        validate_config()

    def test_invalid_gamma_rejected(self, monkeypatch):
        monkeypatch.setitem(settings.config["cross_approx"], "gamma", 2.0)
        with pytest.raises(ConfigurationError):
            validate_config()

    def test_invalid_threads_rejected(self, monkeypatch):
        monkeypatch.setitem(settings.config["runtime"], "threads", 0)
        with pytest.raises(ConfigurationError):
            validate_config()

    def test_thread_override(self, monkeypatch):
        monkeypatch.setitem(settings.config["runtime"], "threads", settings.get("runtime.threads"))
        monkeypatch.setenv("SLAR_THREADS", "3")
        apply_env_overrides()
        assert settings.get("runtime.threads") == 3

    def test_log_level_override(self, monkeypatch):
        monkeypatch.setitem(settings.config["logging"], "level", settings.get("logging.level"))
        monkeypatch.setenv("SLAR_LOG_LEVEL", "debug")
        apply_env_overrides()
        assert settings.get("logging.level") == "DEBUG"

    def test_debug_override(self, monkeypatch):
        monkeypatch.setitem(settings.config["development"], "debug", False)
        monkeypatch.setenv("SLAR_DEBUG", "true")
        apply_env_overrides()
        assert settings.is_development()
        assert settings.get_cross_approx_config()["gamma"] == settings.get("cross_approx.gamma")
