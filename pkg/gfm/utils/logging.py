"""structlog setup for the CLI, the services and the worker pool."""

import functools
import logging
import sys
import time

import structlog


def configure_logging(level: str = "INFO", json_output: bool = True):
    """Route structlog through stdlib logging on stderr; stdout stays free for tables"""
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level.upper(), logging.INFO),
        force=True,
    )

    if json_output:
        tail = [structlog.processors.dict_tracebacks, structlog.processors.JSONRenderer(sort_keys=True)]
    else:
        tail = [structlog.processors.format_exc_info, structlog.dev.ConsoleRenderer(colors=False)]

    structlog.configure(
        processors=[
            # Context bound in the caller reaches pool threads through copy_context
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.StackInfoRenderer(),
            *tail,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        # configure_logging may run more than once per process
        cache_logger_on_first_use=False,
    )


def log_call(func):
    """Debug-log the duration of a service entry point, error-log its failures"""
    logger = structlog.get_logger(func.__module__)

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        started = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as exc:
            logger.error("Call failed",
                         function=func.__qualname__,
                         duration_ms=int((time.perf_counter() - started) * 1000),
                         error_type=type(exc).__name__,
                         error=str(exc))
            raise
        logger.debug("Call completed",
                     function=func.__qualname__,
                     duration_ms=int((time.perf_counter() - started) * 1000))
        return result

    return wrapper
