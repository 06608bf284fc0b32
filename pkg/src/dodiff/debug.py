import inspect
import logging
import traceback
import typing as t
from time import perf_counter

# Local imports
from .decorators import typed_decorator
from .helper.util import get_logger, truncate

# -----------------------------------
# -------- Private Functions --------
# -----------------------------------


def _get_default_args(func: t.Callable) -> t.Dict:
    """
    Get the default arguments for a function
    Args:
        func: The function to retrieve default arguments for

    Returns:
        A dictionary containing the name of the argument
        and the default value assigned to the argument.
    """
    signature = inspect.signature(func)
    return {
        k: v.default
        for k, v in signature.parameters.items()
        if v.default is not inspect.Parameter.empty
    }


def _init_logger(decorator_function: t.Callable,
                 function_to_decorate: t.Callable,
                 logger_name: str,
                 logging_level: int,
                 truncate_longer_than: int) -> t.Tuple[t.Dict, logging.Logger]:
    """
    Runs once per decorated function.

    Args:
        decorator_function: The decorator function applied
        function_to_decorate: The function that will be decorated.
        logger_name: Module name the records are attributed to
        logging_level: The logging level threshold for which to trigger event
        truncate_longer_than: Truncate arguments and outputs longer than specified

    Returns:
        Default arguments of the decorated function and its logger
    """
    return _get_default_args(function_to_decorate), get_logger(logger_name)


# -----------------------------------
# --------- Public Functions --------
# -----------------------------------


@typed_decorator(str,
                 logging_level=(logging.DEBUG, int),
                 truncate_longer_than=(120, int),
                 on_decorator_creation=_init_logger,
                 )
def log_trace(decorated_function,
              # From on_decorator_creation
              default_args: t.Dict,
              logger: logging.Logger,

              # Decorator arguments
              logger_name: str,
              logging_level: int,
              truncate_longer_than: int,
              *args,
              **kwargs):
    """
    Logs the call, its (truncated) arguments and output and the
    wall-clock time spent, as

        kernel_curve(args) -> output, 'N milliseconds'

    Nothing is formatted when the logger would discard the record.
    """
    if not logger.isEnabledFor(logging_level):
        return decorated_function(*args, **kwargs)

    shorten = truncate(truncate_longer_than)
    args_to_log = [repr(argument) for argument in args]
    for key, default in default_args.items():
        args_to_log.append(f"{key}={kwargs.get(key, default)!r}")

    start_time = perf_counter()
    output = decorated_function(*args, **kwargs)
    time_elapsed = perf_counter() - start_time

    logger.log(logging_level,
               f"{decorated_function.__name__}({shorten(', '.join(args_to_log))}) "
               f"-> {shorten(repr(output))}, '{time_elapsed * 1000:.3f} milliseconds'")
    return output


@typed_decorator(tuple, t.Callable, raise_error=(False, bool))
def try_except(decorated_function: t.Callable,
               errors_to_catch: t.Tuple[t.Type[Exception], ...],
               error_callback: t.Callable,
               raise_error: bool = False,
               *args, **kwargs):
    """
    Wraps the entire function around a try-catch block and
    catches the exception.
    Args:
        decorated_function: The function that was wrapped
        errors_to_catch: A tuple of exceptions to catch
        error_callback: Called with (error, traceback string); its return
            value replaces the output of the decorated function
        raise_error: If set to true, the error is re-raised after error_callback
    """
    try:
        return decorated_function(*args, **kwargs)
    except errors_to_catch as error:
        tb = traceback.format_exc()
        output = error_callback(error, tb)
        if raise_error:
            raise
        return output


@typed_decorator(t.Callable)
def stopwatch(decorated_function: t.Callable,
              callback: t.Callable,
              *args,
              **kwargs):
    """
    Measures the wall-clock time taken to execute a function.
    Args:
        decorated_function: The decorated function
        callback: Receives the elapsed time in seconds
    """
    start_time = perf_counter()
    try:
        return decorated_function(*args, **kwargs)
    finally:
        callback(perf_counter() - start_time)
