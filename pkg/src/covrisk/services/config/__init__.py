"""Configuration services."""

from .manager import (
    AppConfigManager,
    EnvOverrides,
    get_config,
    reload_config,
    save_config,
)

__all__ = [
    "AppConfigManager",
    "EnvOverrides",
    "get_config",
    "reload_config",
    "save_config",
]
