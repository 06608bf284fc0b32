import logging
import typing as t

import numpy as np

from .validation import check_instance_of

LOGGER_ROOT = "dodiff"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def get_logger(module_name: str) -> logging.Logger:
    """
    Logger of a dodiff module, parented to the 'dodiff' root logger
    regardless of how the package was imported (src.dodiff.x or dodiff.x)
    """
    leaf = module_name.rsplit('.', 1)[-1]
    if leaf == LOGGER_ROOT:
        return logging.getLogger(LOGGER_ROOT)
    return logging.getLogger(f"{LOGGER_ROOT}.{leaf}")


def logger_factory(logger_name: str = LOGGER_ROOT,
                   level: int = logging.WARNING,
                   file_name: str = None,
                   log_to_console: bool = True) -> logging.Logger:
    """
    Configure a logger with the project formatter.
    Old handlers are removed so repeated calls do not duplicate output.

    Args:
        logger_name: The name of the logger to configure
        level: The threshold level
        file_name: If given, records are also appended to this file
        log_to_console: Attach a stderr handler

    Returns:
        The configured logger
    """
    logger = logging.getLogger(logger_name)
    logger.setLevel(level)
    formatter = logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT)

    # remove all old handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    if log_to_console:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        console_handler.setLevel(level)
        logger.addHandler(console_handler)

    if file_name is not None:
        file_handler = logging.FileHandler(file_name, 'a')
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        logger.addHandler(file_handler)

    return logger


def create_properties(valid_properties: t.Dict, **kwargs) -> t.Dict:
    """
    Fill a property table from kwargs.
    valid_properties maps each key to (data_type, default_value).
    Unknown keys raise a KeyError so typos in configuration documents surface.
    """
    unknown = set(kwargs) - set(valid_properties)
    if unknown:
        raise KeyError(f"Unknown properties: {sorted(unknown)}. "
                       f"Valid properties: {list(valid_properties)}")
    properties: t.Dict = {}
    for key, (data_type, default_value) in valid_properties.items():
        if key in kwargs:
            current_property = kwargs[key]
            if isinstance(current_property, t.Tuple):
                for item in current_property:
                    check_instance_of(item, data_type)
            else:
                check_instance_of(current_property, data_type)
            properties[key] = current_property
        else:
            properties[key] = default_value
    return properties


def get_unique_func_name(func: t.Callable) -> str:
    return f'{func.__module__}.{func.__qualname__}'


def truncate(max_length: int) -> t.Callable:
    """
    Responsible for truncating a sentence based on its length
    :param max_length:
    :return: a truncation function
    """
    def do_truncate(sentence: str) -> str:
        return f"{sentence[:max_length]} ..." if len(sentence) > max_length else sentence
    return do_truncate


def compensated_sum(values: t.Iterable[float]) -> float:
    """
    Neumaier's variant of Kahan summation.
    Used where alternating series lose digits to cancellation.
    """
    total = 0.0
    compensation = 0.0
    for value in values:
        value = float(value)
        running = total + value
        if abs(total) >= abs(value):
            compensation += (total - running) + value
        else:
            compensation += (value - running) + total
        total = running
    return total + compensation


def format_float(value: float) -> str:
    """
    17 significant digits, enough to round-trip an IEEE double
    """
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "nan"
    return format(float(value), '.17g')
