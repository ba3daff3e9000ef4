"""SLAR Configuration Settings"""

import os
from pathlib import Path
from typing import Dict, Any, Optional
import json

from dotenv import load_dotenv

from ..core_engine.errors import ConfigurationError

# Base paths
PROJECT_ROOT = Path(__file__).parent.parent.parent
CONFIG_DIR = PROJECT_ROOT / "config"
DEFAULT_OUTPUT_DIR = PROJECT_ROOT / "runs"


class Settings:
    """Library and benchmark configuration settings"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = Path(config_file) if config_file else CONFIG_DIR / "slar_config.json"
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file with sensible defaults"""
        default_config = {
            "paths": {
                "output_dir": str(DEFAULT_OUTPUT_DIR),
                "checkpoint_subdir": "checkpoints",
                "log_subdir": "logs",
            },

            "logging": {
                "level": "INFO",
                "log_format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                "log_file": "slar.log",
                "to_file": True,
            },

            # Hierarchical Tucker algebra
            "ht_core": {
                "dense_cap": 10_000_000,  # ht_full is an oracle, never a production path
            },

            # Cross approximation defaults
            "cross_approx": {
                "gamma": 0.1,
                "r_min": 1,
                "r_hash_min": 1,
                "pivot_safeguard": 1e-15,
                "local_truncation_factor": 1e-14,
                "rng_seed": 20240601,
            },

            "field_solve": {
                "poisson_tol_factor": 0.1,
                "hint_radius": 2,  # low |k| frequencies offered as pivot candidates
            },

            "time_integration": {
                "cfl": 5.0,
                "dt_floor": 1e-6,
            },

            "diagnostics": {
                "min_entry_samples": 4096,
                "min_entry_seed": 7,
            },

            "runtime": {
                "threads": min(os.cpu_count() or 1, 8),
                "batch_chunk": 4096,  # accessor rows per worker task
            },

            "benchmark": {
                "checkpoint_interval": 10,
                "keep_checkpoints": 3,
            },

            "development": {
                "debug": False,
            },
        }

        if self.config_file.exists():
            try:
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    file_config = json.load(f)
                return self._deep_merge(default_config, file_config)
            except Exception as e:
                print(f"Warning: Could not load config file {self.config_file}: {e}")

        return default_config

    def _deep_merge(self, base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """Deep merge two dictionaries"""
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def save_config(self):
        """Save current configuration to file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=2, ensure_ascii=False)
        except Exception as e:
            print(f"Error saving config: {e}")

    def get(self, path: str, default: Any = None) -> Any:
        """Get configuration value using dot notation (e.g., 'runtime.threads')"""
        keys = path.split('.')
        value = self.config

        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default

        return value

    def set(self, path: str, value: Any):
        """Set configuration value using dot notation"""
        keys = path.split('.')
        config = self.config

        for key in keys[:-1]:
            if key not in config:
                config[key] = {}
            config = config[key]

        config[keys[-1]] = value

    def get_cross_approx_config(self) -> Dict[str, Any]:
        """Get cross approximation defaults"""
        return self.config["cross_approx"]

    def get_runtime_config(self) -> Dict[str, Any]:
        """Get thread and batching configuration"""
        return self.config["runtime"]

    def get_time_integration_config(self) -> Dict[str, Any]:
        """Get time-step selection configuration"""
        return self.config["time_integration"]

    def output_dir(self) -> Path:
        return Path(self.get("paths.output_dir"))

    def ensure_directories(self, output_dir: Optional[Path] = None) -> Dict[str, Path]:
        """Create output, checkpoint and log directories for a run"""
        root = Path(output_dir) if output_dir else self.output_dir()
        dirs = {
            "output": root,
            "checkpoints": root / self.get("paths.checkpoint_subdir", "checkpoints"),
            "logs": root / self.get("paths.log_subdir", "logs"),
        }
        for directory in dirs.values():
            directory.mkdir(parents=True, exist_ok=True)
        return dirs

    def is_development(self) -> bool:
        return bool(self.get("development.debug", False))


# Global settings instance
settings = Settings()


def apply_env_overrides():
    """Apply environment variable overrides"""
    load_dotenv()

    if os.getenv("SLAR_OUTPUT_DIR"):
        settings.set("paths.output_dir", os.getenv("SLAR_OUTPUT_DIR"))

    threads_env = os.getenv("SLAR_THREADS")
    if threads_env:
        try:
            settings.set("runtime.threads", int(threads_env))
        except ValueError:
            print(f"Warning: Invalid SLAR_THREADS environment variable: {threads_env}. Using default.")

    if os.getenv("SLAR_LOG_LEVEL"):
        settings.set("logging.level", os.getenv("SLAR_LOG_LEVEL").upper())

    cap_env = os.getenv("SLAR_DENSE_CAP")
    if cap_env:
        try:
            settings.set("ht_core.dense_cap", int(float(cap_env)))
        except ValueError:
            print(f"Warning: Invalid SLAR_DENSE_CAP environment variable: {cap_env}. Using default.")

    debug_env = os.getenv("SLAR_DEBUG")
    if debug_env:
        settings.set("development.debug", debug_env.lower() in ("true", "1", "yes"))


# Apply environment overrides
apply_env_overrides()


# Configuration validation
def validate_config():
    """Validate configuration settings"""
    errors = []

    for int_key in ["runtime.threads", "runtime.batch_chunk", "ht_core.dense_cap",
                    "cross_approx.r_min", "cross_approx.r_hash_min",
                    "diagnostics.min_entry_samples", "benchmark.checkpoint_interval"]:
        value = settings.get(int_key)
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            errors.append(f"Invalid integer value for {int_key}: {value}")

    gamma = settings.get("cross_approx.gamma")
    if not isinstance(gamma, (int, float)) or not 0 < gamma <= 1:
        errors.append(f"cross_approx.gamma must lie in (0, 1]: {gamma}")

    for positive_key in ["time_integration.cfl", "time_integration.dt_floor",
                         "field_solve.poisson_tol_factor", "cross_approx.pivot_safeguard"]:
        value = settings.get(positive_key)
        if not isinstance(value, (int, float)) or value <= 0:
            errors.append(f"Invalid numeric value for {positive_key}: {value}")

    level = settings.get("logging.level")
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"Invalid logging level: {level}")

    if errors:
        raise ConfigurationError("Configuration validation failed:\n" + "\n".join(errors))


# Validate configuration on import
validate_config()
