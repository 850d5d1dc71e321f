import math
from typing import Optional

import numpy as np

from .exceptions import ValidationError


def validate_positive(value: float) -> bool:
    """Validate a strictly positive finite real"""
    try:
        return math.isfinite(value) and value > 0
    except TypeError:
        return False


def validate_open_unit(value: float) -> bool:
    """Validate a real in the open interval (0, 1)"""
    try:
        return math.isfinite(value) and 0.0 < value < 1.0
    except TypeError:
        return False


def validate_positive_int(value: int) -> bool:
    """Validate an integer >= 1 (bools rejected)"""
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool) and value >= 1


def validate_finite_array(values) -> bool:
    """Validate that every entry is finite"""
    arr = np.asarray(values, dtype=float)
    return bool(np.all(np.isfinite(arr)))


def require(condition: bool, message: str, field: Optional[str] = None):
    """Raise ValidationError unless condition holds"""
    if not condition:
        raise ValidationError(message, field=field)


def require_positive(value: float, field: str):
    require(validate_positive(value), f"{field} must be a positive finite number, got {value!r}", field)


def require_open_unit(value: float, field: str):
    require(validate_open_unit(value), f"{field} must lie in (0, 1), got {value!r}", field)


def require_positive_int(value: int, field: str):
    require(validate_positive_int(value), f"{field} must be an integer >= 1, got {value!r}", field)
