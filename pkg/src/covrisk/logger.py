import json
import logging
import logging.handlers
import sys
from collections.abc import Callable, Mapping, MutableMapping
from pathlib import Path
from typing import Any, cast

import structlog


class FileWriterProcessor:
    """Processor that writes structured logs to file with rotation support."""

    def __init__(
        self, log_file_path: Path | None = None, max_bytes: int = 10 * 1024 * 1024, backup_count: int = 5
    ) -> None:
        """Initialize file writer with rotation.

        Args:
            log_file_path: Path to the log file
            max_bytes: Maximum size of log file before rotation (default: 10MB)
            backup_count: Number of backup files to keep (default: 5)
        """
        self.log_file_path = log_file_path
        self.handler: logging.handlers.RotatingFileHandler | None = None

        if log_file_path:
            self.handler = logging.handlers.RotatingFileHandler(
                filename=str(log_file_path), maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8"
            )
            self.handler.setFormatter(logging.Formatter("%(message)s"))

    def __call__(self, logger: logging.Logger, method_name: str, event_dict: dict[str, Any]) -> dict[str, Any]:
        """Write the log event to file as one JSON line."""
        if self.handler:
            try:
                line = json.dumps(event_dict, default=str, ensure_ascii=False)
                level = logging.INFO
            except (TypeError, ValueError):
                line = str(event_dict)
                level = logging.ERROR
            record = logging.LogRecord(
                name="covrisk", level=level, pathname="", lineno=0, msg=line, args=(), exc_info=None
            )
            self.handler.emit(record)

        return event_dict

    def __del__(self) -> None:
        """Close the handler when the processor is destroyed."""
        if self.handler:
            self.handler.close()


ProcessorCallable = Callable[
    [Any, str, MutableMapping[str, Any]],
    Mapping[str, Any] | str | bytes | bytearray | tuple[Any, ...],
]


def _stderr_logger_factory(*args: object) -> structlog.PrintLogger:
    """PrintLogger on whatever sys.stderr is when the logger is built."""
    return structlog.PrintLogger(file=sys.stderr)


_LEVELS = {"WARNING": logging.WARNING, "INFO": logging.INFO, "DEBUG": logging.DEBUG}


def configure_logging(level: str | None = None) -> None:
    """(Re)configure structlog from the current application config.

    Console output goes to stderr; stdout is reserved for command results.

    Args:
        level: Optional level overriding ``advanced.log_level``
    """
    from covrisk.services.config import get_config

    config = get_config()
    log_level = _LEVELS.get(level or config.advanced.log_level, logging.INFO)

    processors: list[ProcessorCallable] = [
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
    ]

    if config.advanced.log_to_file and config.paths.logs_dir:
        config.paths.logs_dir.mkdir(parents=True, exist_ok=True)
        max_bytes = config.advanced.log_max_size_mb * 1024 * 1024
        writer = FileWriterProcessor(config.paths.logs_dir / "covrisk.log", max_bytes, config.advanced.log_backup_count)
        processors.append(cast(ProcessorCallable, writer))

    processors.append(structlog.processors.JSONRenderer())

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(log_level),
        context_class=dict,
        logger_factory=_stderr_logger_factory,
        cache_logger_on_first_use=False,  # Disable cache to allow level updates
    )
    configure_logging._configured = True  # type: ignore[attr-defined]


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance.

    Args:
        name: Logger name

    Returns:
        Configured logger instance
    """
    if not hasattr(configure_logging, "_configured"):
        configure_logging()

    return cast(structlog.BoundLogger, structlog.get_logger(name))
