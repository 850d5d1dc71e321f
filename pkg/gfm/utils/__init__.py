from .logging import configure_logging, log_call
from .exceptions import (
    GFMError,
    ValidationError,
    ConfigError,
    OracleError,
    DivergenceError,
    VerificationFailure,
    GridTooLargeError,
)
from .error_handlers import handle_cli_errors, exit_code_for
from .metrics import OracleCounter, track_run, track_check, write_metrics

__all__ = [
    'configure_logging',
    'log_call',
    'GFMError',
    'ValidationError',
    'ConfigError',
    'OracleError',
    'DivergenceError',
    'VerificationFailure',
    'GridTooLargeError',
    'handle_cli_errors',
    'exit_code_for',
    'OracleCounter',
    'track_run',
    'track_check',
    'write_metrics',
]
