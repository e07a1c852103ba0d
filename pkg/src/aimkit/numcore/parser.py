"""Problem-input expressions: a pyparsing grammar producing ParamRatFun values.

    expr   := term (("+"|"-") term)*
    term   := signed (("*"|"/") signed)*
    signed := ("+"|"-")* factor
    factor := base ("^" ["+"|"-"] integer)?
    base   := number | "x" | "E" | "i" | "pi" | func "(" expr ")" | "(" expr ")"
    func   := "cos" | "sin" | "sqrt" | "exp"

Numbers are read exactly as rationals. Constants involving ``i``, ``pi`` or a
function call are folded at the working precision.
"""

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Tuple

import pyparsing as pp

from aimkit.errors import ExpressionError
from aimkit.numcore import scalar as sc
from aimkit.numcore.ratfun import ParamRatFun

Mode = Literal["plain", "eigen"]

FUNCTIONS = ("cos", "sin", "sqrt", "exp")


@dataclass(frozen=True)
class Node:
    kind: str
    loc: int
    args: Tuple[Any, ...] = ()


def _chain(s: str, loc: int, toks: pp.ParseResults) -> Node:
    node = toks[0]
    for i in range(1, len(toks), 2):
        rhs = toks[i + 1]
        node = Node(toks[i], rhs.loc, (node, rhs))
    return node


def _signed(s: str, loc: int, toks: pp.ParseResults) -> Node:
    *signs, operand = toks
    if signs.count("-") % 2:
        return Node("neg", loc, (operand,))
    return operand


def _power(s: str, loc: int, toks: pp.ParseResults) -> Node:
    if len(toks) == 1:
        return toks[0]
    return Node("^", loc, (toks[0], int(toks[1])))


@functools.lru_cache(maxsize=None)
def grammar() -> pp.ParserElement:
    """The expression grammar (built once)."""
    expr = pp.Forward()
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")

    number = pp.Regex(r"(\d+\.?\d*|\.\d+)(e[+-]?\d+)?")
    number.set_parse_action(lambda s, loc, t: Node("num", loc, (t[0],)))
    symbol = pp.Keyword("x") | pp.Keyword("E") | pp.Keyword("i") | pp.Keyword("pi")
    symbol.set_parse_action(lambda s, loc, t: Node(t[0], loc))
    func = pp.one_of(FUNCTIONS, as_keyword=True)
    call = func + lpar + expr + rpar
    call.set_parse_action(lambda s, loc, t: Node("call", loc, (t[0], t[1])))

    base = number | call | symbol | (lpar + expr + rpar)
    exponent = pp.Regex(r"[+-]?\d+")
    factor = base + pp.Optional(pp.Suppress("^") + exponent)
    factor.set_parse_action(_power)
    signed = pp.ZeroOrMore(pp.one_of("+ -")) + factor
    signed.set_parse_action(_signed)
    term = signed + pp.ZeroOrMore(pp.one_of("* /") + signed)
    term.set_parse_action(_chain)
    expr <<= term + pp.ZeroOrMore(pp.one_of("+ -") + term)
    expr.set_parse_action(_chain)
    return expr


class _Evaluator:
    def __init__(self, text: str, mode: Mode, prec: int):
        self.text = text
        self.mode = mode
        self.prec = prec
        self.ctx = sc.context(prec)

    def fail(self, message: str, node: Node) -> ExpressionError:
        return ExpressionError(message, self.text, node.loc)

    def __call__(self, node: Node) -> ParamRatFun:
        kind = node.kind
        if kind == "num":
            return ParamRatFun.constant(Fraction(node.args[0]))
        if kind == "x":
            return ParamRatFun.x()
        if kind == "E":
            if self.mode == "plain":
                raise self.fail("E is not allowed in a plain-mode expression", node)
            return ParamRatFun.E()
        if kind == "i":
            return ParamRatFun.constant(self.ctx.mpc(0, 1))
        if kind == "pi":
            return ParamRatFun.constant(+self.ctx.pi)
        if kind == "neg":
            return -self(node.args[0])
        if kind == "call":
            return self.call(node)
        if kind == "^":
            return self.power(node)
        lhs, rhs = self(node.args[0]), self(node.args[1])
        if kind == "+":
            return lhs + rhs
        if kind == "-":
            return lhs - rhs
        if kind == "*":
            return lhs * rhs
        if rhs.has_E():
            raise self.fail("E may appear only polynomially; it cannot be a divisor", node)
        if rhs.is_zero():
            raise self.fail("division by zero", node)
        return lhs / rhs

    def power(self, node: Node) -> ParamRatFun:
        base, k = self(node.args[0]), node.args[1]
        if k >= 0:
            return base ** k
        if base.has_E():
            raise self.fail("E may appear only polynomially; negative powers are not allowed", node)
        if base.is_zero():
            raise self.fail("zero raised to a negative power", node)
        return base ** k

    def call(self, node: Node) -> ParamRatFun:
        name, arg_node = node.args
        arg = self(arg_node)
        if not arg.is_constant():
            raise self.fail(f"{name}() of a non-constant argument is not a rational function", node)
        value = arg.constant_value()
        if sc.is_exact(value):
            if name == "sqrt":
                root = sc.exact_sqrt(Fraction(value))
                if root is not None:
                    return ParamRatFun.constant(root)
            elif value == 0:
                return ParamRatFun.constant(0 if name == "sin" else 1)
        value = sc.convert(value, self.prec)
        return ParamRatFun.constant(sc.demote(getattr(self.ctx, name)(value)))


def parse_expr(text: str, mode: Mode = "plain", prec: int = 256) -> ParamRatFun:
    """Parse ``text`` into a reduced rational function of x (and E in eigen mode).

    Args:
        text: Expression in the problem-input grammar.
        mode: ``"plain"`` forbids E; ``"eigen"`` allows it polynomially.
        prec: Precision used when a constant has to be folded to a float.

    Raises:
        ExpressionError: On a syntax error (with position), E in plain mode,
            E in a divisor, or a function applied to a non-constant.
    """
    if mode not in ("plain", "eigen"):
        raise ValueError(f"Unsupported mode: {mode}. Use plain or eigen.")
    try:
        tree = grammar().parse_string(text, parse_all=True)[0]
    except pp.ParseException as exc:
        raise ExpressionError(f"syntax error: {exc.msg}", text, exc.loc) from exc
    return _Evaluator(text, mode, prec)(tree)
