import functools

import structlog

from .constants import EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERIFY
from .exceptions import (
    ConfigError,
    DivergenceError,
    GFMError,
    GridTooLargeError,
    OracleError,
    ValidationError,
    VerificationFailure,
)

logger = structlog.get_logger(__name__)


def exit_code_for(exc: BaseException) -> int:
    """Map an exception raised by a command to its process exit code"""
    if isinstance(exc, (ConfigError, ValidationError, GridTooLargeError)):
        return EXIT_CONFIG
    if isinstance(exc, VerificationFailure):
        return EXIT_VERIFY
    return EXIT_RUNTIME


def handle_cli_errors(func):
    """Turn exceptions escaping a CLI command into logged exit codes"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)

        except ConfigError as exc:
            logger.error("Config Error",
                         message=exc.message,
                         line=exc.line,
                         key=exc.key)
            return exit_code_for(exc)

        except GridTooLargeError as exc:
            logger.error("Sweep grid too large",
                         n_points=exc.n_points,
                         cap=exc.cap)
            return exit_code_for(exc)

        except ValidationError as exc:
            logger.error("Validation Error",
                         message=exc.message,
                         field=exc.field)
            return exit_code_for(exc)

        except VerificationFailure as exc:
            logger.warning("Verification failed",
                           message=exc.message,
                           failed_checks=exc.failed_checks)
            return exit_code_for(exc)

        except (OracleError, DivergenceError) as exc:
            logger.error("Run aborted",
                         message=exc.message,
                         error_code=exc.error_code,
                         t=exc.t)
            return exit_code_for(exc)

        except GFMError as exc:
            logger.error("Toolkit error",
                         message=exc.message,
                         error_code=exc.error_code)
            return exit_code_for(exc)

        except Exception as exc:
            logger.error("Unexpected Error", error=str(exc))
            return EXIT_RUNTIME

    return wrapper
