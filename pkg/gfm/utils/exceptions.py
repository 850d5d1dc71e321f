"""Custom exception classes"""

import numpy as np


class GFMError(Exception):
    """Base exception for the gradient-free toolkit"""
    def __init__(self, message: str, error_code: str = None):
        self.message = message
        self.error_code = error_code
        super().__init__(self.message)


class ValidationError(GFMError):
    """Raised when an input or precondition check fails"""
    def __init__(self, message: str, field: str = None):
        super().__init__(message, "validation_error")
        self.field = field


class ConfigError(GFMError):
    """Raised when an experiment file cannot be parsed or validated"""
    def __init__(self, message: str, line: int = None, key: str = None):
        super().__init__(message, "config_error")
        self.line = line
        self.key = key


class OracleError(GFMError):
    """Raised when a value oracle returns a non-finite value"""
    def __init__(self, message: str, t: int = None, x=None):
        super().__init__(message, "oracle_error")
        self.t = t
        self.x = None if x is None else np.array(x, dtype=float)


class DivergenceError(GFMError):
    """Raised when an iterate leaves the divergence guard"""
    def __init__(self, message: str, t: int = None, x=None):
        super().__init__(message, "divergence_error")
        self.t = t
        self.x = None if x is None else np.array(x, dtype=float)


class VerificationFailure(GFMError):
    """Raised when a verification suite has failing checks"""
    def __init__(self, message: str, failed_checks=None):
        super().__init__(message, "verification_failure")
        self.failed_checks = list(failed_checks or [])


class GridTooLargeError(GFMError):
    """Raised when a sweep grid exceeds the configured cap"""
    def __init__(self, message: str, n_points: int = None, cap: int = None):
        super().__init__(message, "grid_too_large")
        self.n_points = n_points
        self.cap = cap
