"""
Structured logging for geoinpaint.

Events go to stderr through structlog so that stdout stays free for reports
and tables. Fields bound with :func:`run_context` (run directory, variant,
current step) are attached to every event logged inside the block,
including events from the data and checkpoint modules.
"""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional, Union

import structlog

# third-party loggers that flood DEBUG output (PNG chunk parsing, weight downloads)
QUIET_LOGGERS = ("PIL", "urllib3")


def setup_logging(
    log_file: Optional[Path] = None,
    level: Union[str, int] = "INFO",
    verbose: bool = False,
    json_output: bool = False,
) -> None:
    """
    Configure logging for a geoinpaint command.

    Args:
        log_file: Also write plain-text records here
        level: Level name or ``logging`` constant
        verbose: Shortcut for DEBUG
        json_output: Render events as one JSON object per line
    """
    if verbose:
        level = "DEBUG"
    if isinstance(level, int):
        level = logging.getLevelName(level)
    numeric_level = getattr(logging, level.upper())

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]
    if json_output:
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(format="%(message)s", level=numeric_level, stream=sys.stderr)
    # torch and torchvision report deprecations through warnings.warn
    logging.captureWarnings(True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(numeric_level, logging.INFO))

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(
            logging.Formatter(
                "[%(asctime)s] [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
            )
        )
        logging.getLogger().addHandler(file_handler)


@contextmanager
def run_context(**fields: Any) -> Iterator[None]:
    """
    Bind ``fields`` to every event logged inside the block.

    Nested blocks add to the outer fields; each block restores what was bound
    before it on exit.
    """
    with structlog.contextvars.bound_contextvars(**fields):
        yield


def bind_step(step: int) -> None:
    """Update the ``step`` field of the enclosing run context."""
    structlog.contextvars.bind_contextvars(step=step)


def get_logger(name: str) -> Any:
    """Structured logger for module ``name``."""
    return structlog.get_logger(name)
