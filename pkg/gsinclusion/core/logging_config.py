"""
Logging for gsinclusion.

The package logger `gsinclusion` gets a stderr console handler (warnings by
default, everything with --debug) and a rotating file handler. Reports go
to stdout, so nothing logged ever mixes into them. File records carry the
run they belong to (command and seed) so that the log of a reproducible
run can be found again.
"""

import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Optional

from gsinclusion.core.data_structures import HandlerConfig, LoggerConfig

ROOT_LOGGER_NAME = "gsinclusion"
LOG_FILE_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5


class RunContextFilter(logging.Filter):
    """Stamps records with a `run` attribute such as 'verify seed=42'."""

    def __init__(self, run_label: str):
        super().__init__()
        self.run_label = run_label

    def filter(self, record: logging.LogRecord) -> bool:
        record.run = self.run_label
        return True


def create_log_formatter(
    include_timestamp: bool = True, include_module: bool = True, include_run: bool = False
) -> logging.Formatter:
    """One-line records: [time] [run] level logger [module:line] message."""
    parts = ["%(asctime)s"] if include_timestamp else []
    if include_run:
        parts.append("[%(run)s]")
    parts += ["%(levelname)-8s", "%(name)s"]
    if include_module:
        parts.append("%(module)s:%(lineno)d")
    parts.append("%(message)s")
    return logging.Formatter(fmt=" - ".join(parts), datefmt="%Y-%m-%d %H:%M:%S")


def create_console_handler(
    level: int = logging.WARNING, formatter: Optional[logging.Formatter] = None
) -> logging.StreamHandler:
    """Handler on stderr, so stdout stays a clean report."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(formatter or create_log_formatter(include_timestamp=False))
    return handler


def create_file_handler(
    log_file_path: Path,
    level: int = logging.DEBUG,
    max_bytes: int = LOG_FILE_BYTES,
    backup_count: int = LOG_FILE_BACKUPS,
    formatter: Optional[logging.Formatter] = None,
) -> logging.handlers.RotatingFileHandler:
    """Rotating UTF-8 file handler; the parent directory is created if needed."""
    log_file_path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        filename=str(log_file_path), maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(formatter or create_log_formatter())
    return handler


def get_default_log_directory() -> Path:
    """%LOCALAPPDATA%/GSInclusion/logs on Windows, ~/.local/share/gsinclusion/logs elsewhere."""
    if sys.platform == "win32":
        return Path(os.environ.get("LOCALAPPDATA", os.path.expanduser("~"))) / "GSInclusion" / "logs"
    return Path.home() / ".local" / "share" / "gsinclusion" / "logs"


def create_logger_config(
    name: str,
    level: int = logging.INFO,
    console_level: int = logging.WARNING,
    console_output: bool = True,
    file_output: bool = True,
    log_directory: Optional[Path] = None,
    run_label: Optional[str] = None,
) -> LoggerConfig:
    """
    Describe a logger and its handlers without touching the logging module.

    `name` is also the stem of the log file. File records carry `run_label`
    when one is given.
    """
    log_directory = log_directory or get_default_log_directory()
    handlers: list[HandlerConfig] = []
    if console_output:
        handlers.append(
            {"type": "console", "level": console_level, "formatter": create_log_formatter(include_timestamp=False)}
        )
    if file_output:
        handlers.append(
            {
                "type": "file",
                "path": log_directory / f"{name}.log",
                "level": logging.DEBUG,
                "formatter": create_log_formatter(include_run=run_label is not None),
            }
        )
    config: LoggerConfig = {"name": name, "level": level, "handlers": handlers, "log_directory": log_directory}
    if run_label is not None:
        config["run_label"] = run_label
    return config


def setup_logger(config: LoggerConfig) -> logging.Logger:
    """
    Configure the named logger from `config`, replacing earlier handlers.

    The logger stops propagating to the root logger, so embedding
    applications keep their own logging untouched.
    """
    logger = logging.getLogger(config["name"])
    logger.setLevel(config["level"])
    for old in list(logger.handlers):
        old.close()
    logger.handlers.clear()

    run_label = config.get("run_label")
    for handler_config in config["handlers"]:
        handler: logging.Handler
        if handler_config["type"] == "console":
            handler = create_console_handler(handler_config["level"], handler_config["formatter"])
        elif handler_config["type"] == "file":
            handler = create_file_handler(
                handler_config["path"], level=handler_config["level"], formatter=handler_config["formatter"]
            )
            if run_label is not None:
                handler.addFilter(RunContextFilter(run_label))
        else:
            continue
        logger.addHandler(handler)

    logger.propagate = False
    return logger


def setup_application_logging(
    debug_mode: bool = False,
    log_directory: Optional[Path] = None,
    file_output: bool = True,
    run_label: Optional[str] = None,
) -> logging.Logger:
    """Package logger for one command-line run; --debug lowers both logger and console to DEBUG."""
    level = logging.DEBUG if debug_mode else logging.INFO
    config = create_logger_config(
        name=ROOT_LOGGER_NAME,
        level=level,
        console_level=logging.DEBUG if debug_mode else logging.WARNING,
        file_output=file_output,
        log_directory=log_directory,
        run_label=run_label,
    )
    logger = setup_logger(config)
    target = f"console and {config['log_directory']}" if file_output else "console only"
    logger.info(f"{run_label or 'run'} logging at {logging.getLevelName(level)}, {target}")
    return logger


def get_module_logger(module_name: str) -> logging.Logger:
    """Child of the package logger; `__name__` and bare module names both work."""
    prefix = f"{ROOT_LOGGER_NAME}."
    if module_name.startswith(prefix):
        module_name = module_name[len(prefix) :]
    return logging.getLogger(prefix + module_name)
