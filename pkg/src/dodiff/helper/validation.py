import typing as t
import numbers

import numpy as np


def check_instance_of(value: t.Any, target_type: t.Type):
    if not isinstance(value, target_type):
        raise TypeError(f"{value} must be of instance type {target_type}. "
                        f"{value} is of type: {type(value)}")


def is_real(value: t.Any) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def check_real(name: str, value: t.Any) -> float:
    """
    Coerce value to a finite float.

    Args:
        name: Argument name used in the error message
        value: The value to check

    Returns:
        value as a float
    """
    if not is_real(value):
        raise TypeError(f"'{name}' must be a real number. "
                        f"Passed in value: '{value}' of type: '{type(value)}'")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"'{name}' must be finite. Got: {value}")
    return value


def check_positive(name: str, value: t.Any) -> float:
    value = check_real(name, value)
    if value <= 0.0:
        raise ValueError(f"'{name}' must be strictly positive. Got: {value}")
    return value


def check_non_negative(name: str, value: t.Any) -> float:
    value = check_real(name, value)
    if value < 0.0:
        raise ValueError(f"'{name}' must be non-negative. Got: {value}")
    return value


def check_strictly_increasing(name: str, values: t.Sequence[float]) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"'{name}' must be one-dimensional. Got shape: {array.shape}")
    if array.size > 1 and np.any(np.diff(array) <= 0.0):
        raise ValueError(f"'{name}' must be strictly increasing. Got: {array}")
    return array
