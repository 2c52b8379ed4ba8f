"""
Logging utilities with run ID support for tracing scenario batteries

This module binds a run identifier to every log record emitted while a
scenario, sweep or verification battery is executing.
"""
import sys
import uuid
from typing import Optional
from contextvars import ContextVar
from functools import wraps
from loguru import logger

# Context variable to store the run ID across nested calls
run_id: ContextVar[Optional[str]] = ContextVar('run_id', default=None)

logger.configure(extra={"run_id": "-"})


def generate_run_id() -> str:
    """Generate a new run ID"""
    return uuid.uuid4().hex[:12]


def get_run_id() -> Optional[str]:
    """Get the current run ID"""
    return run_id.get()


def set_run_id(rid: Optional[str]) -> None:
    """Set the run ID for the current context"""
    run_id.set(rid)


def with_run_id(func):
    """
    Decorator that makes sure a run ID is bound while ``func`` executes

    Nested calls reuse the outer run ID, so a sweep and all the scenarios it
    runs share one identifier.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        owner = get_run_id() is None
        if owner:
            set_run_id(generate_run_id())

        bound = logger.bind(run_id=get_run_id())
        bound.debug(f"Entering {func.__name__}")

        try:
            return func(*args, **kwargs)
        except Exception as e:
            bound.error(f"Error in {func.__name__}: {e}")
            raise
        finally:
            bound.debug(f"Exiting {func.__name__}")
            if owner:
                set_run_id(None)

    return wrapper


def log_with_context(level: str, message: str, **kwargs):
    """
    Log a message with the run ID automatically included

    Args:
        level: Log level (info, debug, warning, error, etc.)
        message: Log message
        **kwargs: Additional context bound to the record
    """
    log_method = getattr(logger.bind(run_id=get_run_id() or "-", **kwargs), level)
    log_method(message)


class LogContext:
    """Context manager opening a fresh run ID for one operation"""

    def __init__(self, operation: str):
        self.operation = operation
        self.rid = None
        self._previous = None

    def __enter__(self):
        self._previous = get_run_id()
        self.rid = generate_run_id()
        set_run_id(self.rid)
        logger.bind(run_id=self.rid).info(f"Starting operation: {self.operation}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type:
            logger.bind(run_id=self.rid).error(f"Operation {self.operation} failed: {exc_val}")
        else:
            logger.bind(run_id=self.rid).info(f"Operation {self.operation} completed successfully")
        set_run_id(self._previous)
        return False


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Route loguru records to stderr (stdout carries CSV output) and optionally a file

    Call this at application startup.
    """
    fmt = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
        "<cyan>{extra[run_id]}</cyan> | <level>{message}</level>"
    )
    logger.remove()
    logger.add(sys.stderr, format=fmt, level=level)
    if log_file:
        logger.add(log_file, format=fmt, level=level, rotation="10 MB")
