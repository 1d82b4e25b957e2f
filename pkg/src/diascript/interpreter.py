"""Tree-walking evaluator with a step budget and diagnostic-style errors.

Runtime errors abort the current top-level statement only; execution continues
with the next statement and the error is recorded as a diagnostic. A whole
execution is bounded by a configurable step budget so pathological programs
written mid-keystroke cannot hang a session.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .nodes import (
    Assign,
    BoolLit,
    Call,
    FieldAccess,
    FunctionLit,
    Ident,
    InfixCall,
    ListLit,
    Node,
    NullLit,
    NumberLit,
    Program,
    StringLit,
)
from .parser import ParseResult
from .source import Span
from .values import (
    DslObject,
    Environment,
    NativeFunction,
    ScriptFunction,
    to_display_string,
    type_name,
    values_equal,
)

DEFAULT_STEP_BUDGET = 5_000_000


class EvalError(Exception):
    """Runtime error carrying the span of the offending expression."""

    def __init__(self, span: Span | None, message: str):
        super().__init__(message)
        self.span = span
        self.message = message


class BudgetExceeded(Exception):
    pass


class DuplicateOperator(Exception):
    pass


@dataclass(frozen=True)
class CallContext:
    """Call-site information handed to native functions."""

    interp: "Interpreter"
    env: Environment | None
    span: Span | None
    arg_nodes: tuple[Node, ...] = ()
    named_nodes: dict = field(default_factory=dict)

    def error(self, message: str, span: Span | None = None) -> EvalError:
        return EvalError(span or self.span, message)

    def report(self, severity: str, message: str, span: Span | None = None) -> None:
        self.interp.report(severity, span or self.span, message)


@dataclass
class ExecutionResult:
    """Outcome of one program execution; immutable by convention."""

    value: object
    diagnostics: list[Diagnostic]
    element_origins: dict[str, Span]
    diagram: object | None = None  # model.Diagram when the program built one
    edit_sites: dict[str, object] = field(default_factory=dict)


_COMPARISONS = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


class Interpreter:
    def __init__(self, step_budget: int = DEFAULT_STEP_BUDGET):
        self.step_budget = step_budget
        self.steps = 0
        self.diagnostics: list[Diagnostic] = []
        # module-owned execution state, e.g. the active diagram builder
        self.slots: dict[str, object] = {}

    # diagnostics

    def report(self, severity: str, span: Span | None, message: str) -> None:
        self.diagnostics.append(Diagnostic(severity, span, message))

    # evaluation

    def _tick(self, node: Node) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise BudgetExceeded(f"step budget of {self.step_budget} exhausted")

    def evaluate(self, node: Node, env: Environment):
        self._tick(node)
        if isinstance(node, NumberLit):
            return node.value
        if isinstance(node, StringLit):
            return node.value
        if isinstance(node, BoolLit):
            return node.value
        if isinstance(node, NullLit):
            return None
        if isinstance(node, Ident):
            found, value = env.lookup(node.name)
            if not found:
                raise EvalError(node.span, f"undefined name '{node.name}'")
            return value
        if isinstance(node, Assign):
            return self._eval_assign(node, env)
        if isinstance(node, Call):
            return self._eval_call(node, env)
        if isinstance(node, InfixCall):
            return self._eval_infix(node, env)
        if isinstance(node, FunctionLit):
            return ScriptFunction(node.params, node.body, env)
        if isinstance(node, ListLit):
            return [self.evaluate(item, env) for item in node.items]
        if isinstance(node, FieldAccess):
            return self._eval_field(node, env)
        if isinstance(node, Program):
            value = None
            for stmt in node.statements:
                value = self.evaluate(stmt, env)
            return value
        raise EvalError(node.span, f"cannot evaluate {type(node).__name__}")

    def _eval_assign(self, node: Assign, env: Environment):
        value = self.evaluate(node.value, env)
        target = node.target
        if isinstance(target, Ident):
            env.assign(target.name, value)
            return value
        if isinstance(target, FieldAccess):
            obj = self.evaluate(target.obj, env)
            if isinstance(obj, DslObject):
                obj.set_field(target.name, value)
                return value
            raise EvalError(node.span, f"cannot assign a field of {type_name(obj)}")
        raise EvalError(node.span, "invalid assignment target")

    def _eval_call(self, node: Call, env: Environment):
        callee = self.evaluate(node.callee, env)
        args: list = []
        arg_nodes: list[Node] = []
        named: dict[str, object] = {}
        named_nodes: dict[str, Node] = {}
        for arg in node.args:
            if isinstance(arg, Assign) and isinstance(arg.target, Ident):
                named[arg.target.name] = self.evaluate(arg.value, env)
                named_nodes[arg.target.name] = arg.value
            else:
                args.append(self.evaluate(arg, env))
                arg_nodes.append(arg)
        ctx = CallContext(self, env, node.span, tuple(arg_nodes), named_nodes)
        return self.call(callee, args, named, ctx)

    def _eval_infix(self, node: InfixCall, env: Environment):
        left = self.evaluate(node.left, env)
        right = self.evaluate(node.right, env)
        found, impl = env.lookup(node.op)
        if found and isinstance(impl, (ScriptFunction, NativeFunction)):
            ctx = CallContext(self, env, node.span, (node.left, node.right))
            return self.call(impl, [left, right], {}, ctx)
        builtin = self._builtin_op(node.op)
        if builtin is not None:
            return builtin(left, right, node.span)
        raise EvalError(node.span, f"unknown operator '{node.op}'")

    def _eval_field(self, node: FieldAccess, env: Environment):
        obj = self.evaluate(node.obj, env)
        if isinstance(obj, DslObject):
            return obj.get_field(node.name)
        getter = getattr(obj, "dsl_get_field", None)
        if getter is not None:
            return getter(node.name)
        raise EvalError(node.span, f"{type_name(obj)} has no fields")

    # calls

    def call(self, fn, args: list, named: dict, ctx: CallContext):
        self._tick_call()
        if isinstance(fn, NativeFunction):
            return fn.fn(ctx, args, named)
        if isinstance(fn, ScriptFunction):
            env = Environment(parent=fn.env)
            self._bind_params(fn, env, args, named)
            value = None
            for stmt in fn.body:
                value = self.evaluate(stmt, env)
            return value
        raise EvalError(ctx.span, f"{type_name(fn)} is not callable")

    def _tick_call(self) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise BudgetExceeded(f"step budget of {self.step_budget} exhausted")

    @staticmethod
    def _bind_params(fn: ScriptFunction, env: Environment, args: list, named: dict) -> None:
        if fn.params is None:
            env.define("it", args[0] if args else None)
            return
        for i, param in enumerate(fn.params):
            if param in named:
                env.define(param, named[param])
            elif i < len(args):
                env.define(param, args[i])
            else:
                env.define(param, None)

    def eval_block_with_target(
        self,
        block: ScriptFunction,
        target: DslObject,
        extra_bindings: dict | None = None,
        args: tuple = (),
    ):
        """Evaluate a scope-function block: bare assignments write ``target``
        fields, reads fall back to the block's lexical scope."""
        env = Environment(parent=block.env, assign_target=target)
        if extra_bindings:
            env.bindings.update(extra_bindings)
        # unlike a call, a scope block without arguments leaves `it` lexical
        if block.params is not None or args:
            self._bind_params(block, env, list(args), {})
        value = None
        for stmt in block.body:
            value = self.evaluate(stmt, env)
        return value

    # infix operator registry

    def register_infix(self, env: Environment, name: str, impl) -> None:
        """Bind an infix operator in ``env``; later InfixCalls dispatch to it."""
        if env.defines_locally(name):
            raise DuplicateOperator(f"operator '{name}' already bound in this scope")
        env.define(name, impl)

    # built-in arithmetic and comparison

    def _builtin_op(self, op: str):
        if op == "+":
            return self._op_add
        if op in ("-", "*", "/", "%"):
            return lambda a, b, span, _op=op: self._op_arith(_op, a, b, span)
        if op in _COMPARISONS:
            return lambda a, b, span, _op=op: self._op_compare(_op, a, b, span)
        if op == "==":
            return lambda a, b, span: values_equal(a, b)
        if op == "!=":
            return lambda a, b, span: not values_equal(a, b)
        return None

    @staticmethod
    def _require_number(value, span: Span, op: str) -> float:
        if isinstance(value, float) and not isinstance(value, bool):
            return value
        raise EvalError(span, f"operator '{op}' expects numbers, got {type_name(value)}")

    def _op_add(self, a, b, span: Span):
        if isinstance(a, str) or isinstance(b, str):
            return to_display_string(a) + to_display_string(b)
        x = self._require_number(a, span, "+")
        y = self._require_number(b, span, "+")
        return self._finite(x + y, span)

    def _op_arith(self, op: str, a, b, span: Span):
        x = self._require_number(a, span, op)
        y = self._require_number(b, span, op)
        if op == "-":
            return self._finite(x - y, span)
        if op == "*":
            return self._finite(x * y, span)
        if y == 0.0 and op in ("/", "%"):
            raise EvalError(span, "division by zero")
        return self._finite(x / y if op == "/" else x % y, span)

    def _op_compare(self, op: str, a, b, span: Span):
        if isinstance(a, str) and isinstance(b, str):
            return _COMPARISONS[op](a, b)
        x = self._require_number(a, span, op)
        y = self._require_number(b, span, op)
        return _COMPARISONS[op](x, y)

    @staticmethod
    def _finite(value: float, span: Span) -> float:
        if value != value or value in (float("inf"), float("-inf")):
            raise EvalError(span, "arithmetic produced a non-finite number")
        return value


def evaluate_program(
    parsed: ParseResult | Program,
    modules=(),
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> ExecutionResult:
    """Run a program in a fresh environment with the given DSL modules.

    Parse errors become diagnostics; statements that raise at runtime are
    skipped while the rest of the program keeps executing. The result is
    deterministic for identical inputs.
    """
    if isinstance(parsed, ParseResult):
        program = parsed.program
        parse_errors = parsed.errors
    else:
        program = parsed
        parse_errors = ()

    interp = Interpreter(step_budget=step_budget)
    for err in parse_errors:
        interp.report("error", err.span, err.message)

    env = Environment()
    for module in modules:
        module(interp, env)

    value = None
    for stmt in program.statements:
        try:
            value = interp.evaluate(stmt, env)
        except EvalError as err:
            interp.report("error", err.span, err.message)
        except BudgetExceeded as err:
            interp.report("error", stmt.span, str(err))
            break
        except RecursionError:
            interp.report("error", stmt.span, "recursion too deep")
            break

    diagram = interp.slots.get("last_diagram")
    origins = interp.slots.get("element_origins", {})
    edit_sites = interp.slots.get("edit_sites", {})
    return ExecutionResult(value, interp.diagnostics, origins, diagram, edit_sites)
