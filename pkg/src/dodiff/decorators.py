"""
Core building block for the decorators used across dodiff.
A decorator built with typed_decorator declares the types of its own
arguments, so misuse is caught when the decorator is applied
instead of when the decorated function first runs.
"""
import inspect
import typing as t
from functools import wraps


def _handle_decorator_kwargs(type_template_args: t.Tuple,
                             type_template_kwargs: t.Dict,
                             decorator_args: t.Tuple,
                             decorator_kwargs: t.Dict) -> t.Tuple:
    """
    Merge keyword arguments of the decorator into its positional arguments.

    Each keyword template is either a plain default value (any type accepted)
    or a non-empty tuple (default, *allowed_types).

    Returns:
        Two tuples: the decorator values and the types each value must satisfy
    """
    unknown = set(decorator_kwargs) - set(type_template_kwargs)
    if unknown:
        raise TypeError(f"Unexpected decorator keyword arguments: {sorted(unknown)}")

    decorator_values, decorator_types = [], []
    for key, template in type_template_kwargs.items():
        is_tuple = isinstance(template, tuple)
        if is_tuple and not len(template):
            raise ValueError("Cannot provide an empty tuple as default kwarg.")

        types_to_check = template[1:] if is_tuple and len(template) > 1 else (object,)
        default_value = template[0] if is_tuple else template
        decorator_values.append(decorator_kwargs.get(key, default_value))
        decorator_types.append(types_to_check)

    return tuple(decorator_args) + tuple(decorator_values), \
        tuple(type_template_args) + tuple(decorator_types)


def typed_decorator(*type_template_args,
                    on_decorator_creation: t.Callable = None,
                    **type_template_kwargs):
    """
    Create a type-checked decorator.

    Args:
        *type_template_args: Types of the positional arguments of the new decorator.
            A tuple of types accepts any of them.
        on_decorator_creation: Called once per decorated function with
            (new_decorator, decorated_function, *decorator_args). The items of
            the returned tuple are passed to the decorator body before its own
            arguments.
        **type_template_kwargs: Keyword arguments of the new decorator, either
            a default value or a tuple (default, *allowed_types).

    E.g.

        @typed_decorator((float, int), callback=(print, t.Callable))
        def slower_than(decorated_function, limit_ms, callback, *args, **kwargs):
            ...

        @slower_than(100)
        def work():
            ...

    Returns:
        The decorator factory
    """

    def inner(new_decorator_function: t.Callable):
        if not callable(new_decorator_function):
            raise TypeError("new_decorator_function must be callable.")

        @wraps(new_decorator_function)
        def returned_func(*decorator_args, **decorator_kwargs):
            # Bare usage: @decorator instead of @decorator(...)
            if len(decorator_args) == 1 and not decorator_kwargs and not type_template_args \
                    and inspect.isfunction(decorator_args[0]):
                function_to_wrap = decorator_args[0]
                values, _ = _handle_decorator_kwargs((), type_template_kwargs, (), {})
                return _wrap(new_decorator_function, function_to_wrap, values)

            values, types = _handle_decorator_kwargs(type_template_args,
                                                     type_template_kwargs,
                                                     decorator_args,
                                                     decorator_kwargs)
            if len(values) != len(types):
                raise ValueError(f"Passed '{len(decorator_args)}' argument: '{decorator_args}' "
                                 f"to decorator: '{new_decorator_function.__name__}'. "
                                 f"Should have '{len(type_template_args)}' arguments "
                                 f"of type: {type_template_args}")

            for decorator_arg, target_type in zip(values, types):
                if not isinstance(decorator_arg, target_type):
                    raise TypeError(f"Passed invalid type: {type(decorator_arg)}. "
                                    f"Expected type: '{target_type}'")

            def wrapped_func(decorated_function: t.Callable):
                return _wrap(new_decorator_function, decorated_function, values)
            return wrapped_func

        def _wrap(decorator_body: t.Callable, decorated_function: t.Callable, values: t.Tuple):
            preprocessed = ()
            if callable(on_decorator_creation):
                preprocessed = tuple(on_decorator_creation(decorator_body,
                                                           decorated_function,
                                                           *values))

            @wraps(decorated_function)
            def final_func(*args, **kwargs):
                return decorator_body(decorated_function,
                                      *preprocessed,
                                      *values,
                                      *args,
                                      **kwargs)
            return final_func

        returned_func.original = new_decorator_function
        return returned_func

    # Triggered when called as @typed_decorator instead of @typed_decorator(...)
    if len(type_template_args) == 1 and inspect.isfunction(type_template_args[0]) \
            and on_decorator_creation is None and not type_template_kwargs:
        decorator_function = type_template_args[0]
        type_template_args = ()
        return inner(decorator_function)

    return inner
