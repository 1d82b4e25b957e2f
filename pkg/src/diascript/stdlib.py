"""Layer-1 natives: collections, control flow, and general helpers."""

from __future__ import annotations

import math

from .interpreter import CallContext, Interpreter
from .values import (
    DslObject,
    Environment,
    NativeFunction,
    ScriptFunction,
    to_display_string,
    type_name,
)


def _number(ctx: CallContext, value, what: str) -> float:
    if isinstance(value, float) and not isinstance(value, bool):
        return value
    raise ctx.error(f"{what} must be a number, got {type_name(value)}")


def _integer(ctx: CallContext, value, what: str) -> int:
    n = _number(ctx, value, what)
    if n != int(n):
        raise ctx.error(f"{what} must be an integer, got {to_display_string(n)}")
    return int(n)


def _callable(ctx: CallContext, value, what: str):
    if isinstance(value, (ScriptFunction, NativeFunction)):
        return value
    raise ctx.error(f"{what} must be a function, got {type_name(value)}")


def _native_range(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("range(n) takes exactly one argument")
    n = _integer(ctx, args[0], "range bound")
    if n < 0:
        raise ctx.error("range bound must not be negative")
    return [float(i) for i in range(n)]


def _native_for_each(ctx: CallContext, args, named):
    if len(args) != 2:
        raise ctx.error("forEach(list, fn) takes exactly two arguments")
    items, fn = args
    if not isinstance(items, list):
        raise ctx.error(f"forEach expects a list, got {type_name(items)}")
    fn = _callable(ctx, fn, "forEach callback")
    for index, item in enumerate(items):
        ctx.interp.call(fn, [item, float(index)], {}, ctx)
    return None


def _native_if(ctx: CallContext, args, named):
    if len(args) not in (2, 3):
        raise ctx.error("if(condition, then, else?) takes two or three arguments")
    condition = args[0]
    if not isinstance(condition, bool):
        raise ctx.error(f"condition must be true or false, got {type_name(condition)}")
    branch = args[1] if condition else (args[2] if len(args) == 3 else None)
    if isinstance(branch, (ScriptFunction, NativeFunction)):
        return ctx.interp.call(branch, [], {}, ctx)
    return branch


def _native_get(ctx: CallContext, args, named):
    if len(args) != 2:
        raise ctx.error("get(list, index) takes exactly two arguments")
    items, index = args
    i = _integer(ctx, index, "index")
    if isinstance(items, (list, str)):
        if 0 <= i < len(items):
            return items[i]
        raise ctx.error(f"index {i} out of bounds for length {len(items)}")
    raise ctx.error(f"get expects a list or string, got {type_name(items)}")


def _native_size(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("size(value) takes exactly one argument")
    value = args[0]
    if isinstance(value, (list, str)):
        return float(len(value))
    if isinstance(value, DslObject):
        return float(len(value.fields))
    raise ctx.error(f"size expects a list, string, or object, got {type_name(value)}")


def _native_object(ctx: CallContext, args, named):
    if args:
        raise ctx.error("object() takes only named arguments")
    return DslObject(named)


def _native_str(ctx: CallContext, args, named):
    if len(args) != 1:
        raise ctx.error("str(value) takes exactly one argument")
    return to_display_string(args[0])


def _native_print(ctx: CallContext, args, named):
    ctx.report("info", " ".join(to_display_string(a) for a in args))
    return None


def _math1(name: str, fn):
    def impl(ctx: CallContext, args, named):
        if len(args) != 1:
            raise ctx.error(f"{name}(x) takes exactly one argument")
        return float(fn(_number(ctx, args[0], "argument")))

    return impl


def _native_min(ctx: CallContext, args, named):
    if not args:
        raise ctx.error("min needs at least one argument")
    return min(_number(ctx, a, "argument") for a in args)


def _native_max(ctx: CallContext, args, named):
    if not args:
        raise ctx.error("max needs at least one argument")
    return max(_number(ctx, a, "argument") for a in args)


def _native_sqrt(ctx: CallContext, args, named):
    x = _number(ctx, args[0] if args else None, "argument")
    if x < 0:
        raise ctx.error("sqrt of a negative number")
    return math.sqrt(x)


def install_stdlib(interp: Interpreter, env: Environment) -> None:
    natives = {
        "range": _native_range,
        "forEach": _native_for_each,
        "if": _native_if,
        "get": _native_get,
        "size": _native_size,
        "object": _native_object,
        "str": _native_str,
        "print": _native_print,
        "abs": _math1("abs", abs),
        "floor": _math1("floor", math.floor),
        "ceil": _math1("ceil", math.ceil),
        "round": _math1("round", round),
        "min": _native_min,
        "max": _native_max,
        "sqrt": _native_sqrt,
    }
    for name, fn in natives.items():
        env.define(name, NativeFunction(name, fn))
