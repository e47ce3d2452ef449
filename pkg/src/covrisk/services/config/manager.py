"""Configuration management for covrisk."""

import os
import sys
from pathlib import Path
from typing import Any, Literal, cast

import yaml
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from covrisk.models.app_config import AppConfig


class EnvOverrides(BaseSettings):
    """Environment variables that override the YAML file (``COVRISK_<KEY>``)."""

    model_config = SettingsConfigDict(env_prefix="COVRISK_", extra="ignore")

    seed: int | None = None
    replicates: int | None = None
    workers: int | None = None
    shard_size: int | None = None
    data_dir: Path | None = None
    log_level: Literal["WARNING", "INFO", "DEBUG"] | None = None


def _default_config_path() -> Path:
    """Platform-specific location of config.yaml."""
    if sys.platform == "win32":
        # Windows: %APPDATA%\covrisk
        config_dir = Path(os.getenv("APPDATA", str(Path.home()))) / "covrisk"
    elif sys.platform == "darwin":
        # macOS: ~/Library/Application Support/covrisk
        config_dir = Path.home() / "Library" / "Application Support" / "covrisk"
    else:
        # Linux/Unix: ~/.config/covrisk
        config_dir = Path.home() / ".config" / "covrisk"
    return config_dir / "config.yaml"


class AppConfigManager:
    """Manages application configuration with YAML file and environment variable support."""

    def __init__(self, config_path: Path | None = None) -> None:
        """Initialize configuration manager.

        Args:
            config_path: Path to config file. If None, uses COVRISK_CONFIG_PATH
                        environment variable or defaults to platform-specific config directory
        """
        if config_path is None:
            env_path = os.getenv("COVRISK_CONFIG_PATH")
            config_path = Path(env_path).expanduser() if env_path else _default_config_path()

        self.config_path = config_path
        self._config: AppConfig | None = None

    def load(self) -> AppConfig:
        """Load configuration from file and apply environment variable overrides.

        A missing file is not an error: defaults apply and nothing is written.

        Returns:
            Loaded configuration
        """
        config_data: dict[str, Any] = {}
        if self.config_path.exists():
            with open(self.config_path, encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}

        config = AppConfig(**config_data)
        return self._apply_env_overrides(config)

    def save(self, config: AppConfig) -> None:
        """Save configuration to YAML file.

        Args:
            config: Configuration to save
        """
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        config_dict = cast(dict[str, Any], config.model_dump(mode="json", exclude_none=True))

        with open(self.config_path, "w", encoding="utf-8") as f:
            yaml.dump(config_dict, f, default_flow_style=False, allow_unicode=True, sort_keys=False)

    def _apply_env_overrides(self, config: AppConfig) -> AppConfig:
        """Apply environment variable overrides.

        Environment variables use the format: COVRISK_<KEY>
        Examples:
            - COVRISK_SEED=7
            - COVRISK_WORKERS=4
            - COVRISK_DATA_DIR=~/custom/path

        Malformed values are ignored and the file/default value is kept.

        Args:
            config: Base configuration

        Returns:
            Configuration with environment overrides applied
        """
        try:
            env = EnvOverrides()
        except ValidationError:
            return config

        mc = config.monte_carlo
        if env.seed is not None and 0 <= env.seed < 2**64:
            mc.seed = env.seed
        if env.replicates is not None and env.replicates >= 1:
            mc.replicates = env.replicates
        if env.workers is not None and env.workers >= 1:
            mc.workers = env.workers
        if env.shard_size is not None and env.shard_size >= 1:
            mc.shard_size = env.shard_size

        if env.data_dir is not None:
            config.paths.data_dir = env.data_dir.expanduser()
            # Recalculate dependent paths
            config.paths.calibrations_dir = None
            config.paths.logs_dir = None
            config.paths.model_post_init(None)

        if env.log_level is not None:
            config.advanced.log_level = env.log_level

        return config

    def get_config(self) -> AppConfig:
        """Get configuration (singleton pattern).

        Returns:
            Current configuration
        """
        if self._config is None:
            self._config = self.load()
        return self._config

    def reload(self, config_path: Path | None = None) -> AppConfig:
        """Reload configuration, optionally from a different file.

        Args:
            config_path: New config file location, or None to keep the current one

        Returns:
            Reloaded configuration
        """
        if config_path is not None:
            self.config_path = config_path
        self._config = self.load()
        return self._config


# Global configuration manager instance
_config_manager = AppConfigManager()


def get_config() -> AppConfig:
    """Get global application configuration.

    Returns:
        Application configuration
    """
    return _config_manager.get_config()


def reload_config(config_path: Path | None = None) -> AppConfig:
    """Reload configuration from file.

    Args:
        config_path: Optional replacement config file

    Returns:
        Reloaded configuration
    """
    return _config_manager.reload(config_path)


def save_config(config: AppConfig) -> None:
    """Save configuration to file.

    Args:
        config: Configuration to save
    """
    _config_manager.save(config)
