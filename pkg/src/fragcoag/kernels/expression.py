"""
Restricted arithmetic expressions used in JSON configuration: numbers, a fixed set of variable names, + - * /, unary minus and ** with a nonnegative integer exponent.
"""
import ast
import operator
from typing import Callable, Iterable

import numpy as np

from ..exceptions import InvalidKernelError
from .rate_kernel import KernelBounds, RateKernel, StateView

_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_UNARY = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


class Expression():
    """
    Compiled arithmetic expression over named variables

    Args:
        text (str): Expression, e.g. "b * m" or "(1 - b) / (i - 1)"
        variables (Iterable[str]): Names the expression may reference

    Raises:
        InvalidKernelError: Syntax error, unknown name, or a construct other than the allowed operators

    Example:
        f = Expression("-(m - 1)**2", ['m'])
        f(m=0.5)  # -0.25
    """

    def __init__(self, text: str, variables: Iterable[str]):
        self.text = str(text)
        self.variables = frozenset(variables)
        try:
            tree = ast.parse(self.text, mode='eval')
        except SyntaxError as e:
            raise InvalidKernelError("Cannot parse expression '{}': {}".format(self.text, e.msg)) from e
        self.names = set()
        self._fn = self._compile(tree.body)

    def _compile(self, node) -> Callable:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            value = float(node.value)
            return lambda env: value
        if isinstance(node, ast.Name):
            if node.id not in self.variables:
                raise InvalidKernelError("Unknown name '{}' in '{}' (allowed: {})".format(node.id, self.text, sorted(self.variables)))
            self.names.add(node.id)
            name = node.id
            return lambda env: env[name]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
            op = _BINARY[type(node.op)]
            left = self._compile(node.left)
            right = self._compile(node.right)
            return lambda env: op(left(env), right(env))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            exponent = node.right
            if not (isinstance(exponent, ast.Constant) and isinstance(exponent.value, int) and exponent.value >= 0):
                raise InvalidKernelError("Only nonnegative integer exponents are allowed in '{}'".format(self.text))
            base = self._compile(node.left)
            power = exponent.value
            return lambda env: base(env) ** power
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            op = _UNARY[type(node.op)]
            operand = self._compile(node.operand)
            return lambda env: op(operand(env))
        raise InvalidKernelError("Unsupported construct {} in '{}'".format(type(node).__name__, self.text))

    def __call__(self, **values):
        missing = self.names - set(values)
        if missing:
            raise InvalidKernelError("Expression '{}' needs values for {}".format(self.text, sorted(missing)))
        return self._fn(values)

    def __repr__(self) -> str:
        return "Expression('{}')".format(self.text)


def scalar_function(text: str, variable: str = 'm') -> Callable[[float], float]:
    """Single-variable function from an expression string"""
    expr = Expression(text, [variable])

    def fn(value):
        return expr(**{variable: value})
    fn.expression = expr
    return fn


class ExpressionKernel(RateKernel):
    """
    Kernel with both rates given as expressions in m (the state norm), b, i and j

    Args:
        C (str): Merge rate expression, e.g. "b * m"
        F (str): Split rate expression, evaluated for 1 <= j < i, e.g. "(1 - b) / (i - 1)"
        bounds (KernelBounds): Declared constants
    """

    def __init__(self, C: str, F: str, bounds: KernelBounds):
        super().__init__(bounds)
        self.C_expr = Expression(C, ['m', 'b', 'i', 'j'])
        self.F_expr = Expression(F, ['m', 'b', 'i', 'j'])
        self.state_dependent = 'm' in self.C_expr.names or 'm' in self.F_expr.names

    def _coagulation(self, i, j, x: StateView, b: float):
        return np.asarray(self.C_expr(m=x.m, b=b, i=i.astype(float), j=j.astype(float)), dtype=float)

    def _fragmentation(self, i, j, x: StateView, b: float):
        return np.asarray(self.F_expr(m=x.m, b=b, i=i.astype(float), j=j.astype(float)), dtype=float)

    def to_json(self) -> dict:
        return {'type': 'expr', 'C': self.C_expr.text, 'F': self.F_expr.text, 'bounds': self.bounds.to_json()}

    def __repr__(self) -> str:
        return "ExpressionKernel(C='{}', F='{}')".format(self.C_expr.text, self.F_expr.text)
