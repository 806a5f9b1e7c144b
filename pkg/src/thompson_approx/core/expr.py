"""
Expression language for input diffeomorphisms.

Grammar (tightest binding last):

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | "+" unary | power
    power := atom ("^" unary)?          # right-associative, constant exponent
    atom  := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"

Evaluation is forward-mode: a Dual carries value and derivative, either as
floats or as numpy arrays for whole sample grids.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh")
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>\*\*|[-+*/^(),])"
)


# --- AST -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a name from FUNCTIONS
    arg: Expr


@dataclass(frozen=True)
class Binary:
    op: str  # + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: float


Expr = Var | Num | Const | Unary | Binary | Pow


# --- tokenizer / parser ----------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExprSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup or "op"
        value = "^" if match.group() == "**" else match.group()
        tokens.append(Token(kind, value, pos))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek
        if tok.text != text or tok.kind != "op":
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ExprSyntaxError(f"Expected {text!r}, found {what}", tok.pos)
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek.kind != "end":
            raise ExprSyntaxError(f"Unexpected {self.peek.text!r}", self.peek.pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek.kind == "op" and self.peek.text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek.kind == "op" and self.peek.text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek.kind == "op" and self.peek.text == "-":
            self.advance()
            return Unary("neg", self.unary())
        if self.peek.kind == "op" and self.peek.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek.kind == "op" and self.peek.text == "^":
            tok = self.advance()
            exponent = self.unary()
            value = _constant_value(exponent)
            if value is None:
                raise ExprSyntaxError("Exponent must be a numeric literal", tok.pos + 1)
            return Pow(base, value)
        return base

    def atom(self) -> Expr:
        tok = self.peek
        if tok.kind == "end":
            raise ExprSyntaxError("Unexpected end of input", tok.pos)
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise UnknownIdentifierError(f"Unknown identifier {tok.text!r}", tok.pos)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"Unexpected {tok.text!r}", tok.pos)


def parse(text: str) -> Expr:
    """Parse expression text into an AST."""
    return _Parser(text).parse()


def _constant_value(node: Expr) -> float | None:
    """Fold a variable-free subtree to a float, None if it mentions x."""
    if contains_var(node):
        return None
    try:
        out = evaluate(node, Dual(0.0, 0.0))
    except DomainError:
        return None
    return float(out.value)


def contains_var(node: Expr) -> bool:
    match node:
        case Var():
            return True
        case Num() | Const():
            return False
        case Unary(arg=arg):
            return contains_var(arg)
        case Binary(left=left, right=right):
            return contains_var(left) or contains_var(right)
        case Pow(base=base):
            return contains_var(base)
    return False


def is_affine(node: Expr) -> bool:
    """True when the expression is a + b*x structurally (derivative constant)."""
    match node:
        case Var() | Num() | Const():
            return True
        case Unary(op="neg", arg=arg):
            return is_affine(arg)
        case Unary(arg=arg):
            return not contains_var(arg)
        case Binary(op="+" | "-", left=left, right=right):
            return is_affine(left) and is_affine(right)
        case Binary(op="*", left=left, right=right):
            if not contains_var(left):
                return is_affine(right)
            return not contains_var(right) and is_affine(left)
        case Binary(op="/", left=left, right=right):
            return not contains_var(right) and is_affine(left)
        case Pow(base=base, exponent=exponent):
            return not contains_var(base) or exponent in (0.0, 1.0) and is_affine(base)
    return False


# --- pretty printer --------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    match node:
        case Binary(op=op):
            return _PREC[op]
        case Unary(op="neg"):
            return _NEG_PREC
        case Pow():
            return _POW_PREC
    return _ATOM_PREC


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 2.0**53:
        return str(int(value))
    return repr(value)


def format_expr(node: Expr) -> str:
    """Render an AST with the minimal parentheses that preserve its structure."""
    match node:
        case Var():
            return "x"
        case Num(value=value):
            text = _format_number(value)
            return f"({text})" if value < 0 else text
        case Const(name=name):
            return name
        case Unary(op="neg", arg=arg):
            inner = format_expr(arg)
            return f"-({inner})" if _prec(arg) < _NEG_PREC else f"-{inner}"
        case Unary(op=op, arg=arg):
            return f"{op}({format_expr(arg)})"
        case Binary(op=op, left=left, right=right):
            lhs, rhs = format_expr(left), format_expr(right)
            if _prec(left) < _PREC[op]:
                lhs = f"({lhs})"
            if _prec(right) <= _PREC[op]:
                rhs = f"({rhs})"
            sep = f" {op} " if op in "+-" else op
            return f"{lhs}{sep}{rhs}"
        case Pow(base=base, exponent=exponent):
            text = format_expr(base)
            if _prec(base) <= _POW_PREC:
                text = f"({text})"
            exp_text = _format_number(exponent)
            if exponent < 0:
                exp_text = f"({exp_text})"
            return f"{text}^{exp_text}"
    raise TypeError(f"Not an expression node: {node!r}")


# --- forward-mode evaluation ----------------------------------------------

Scalar = float | np.ndarray


class Dual:
    """Dual number value + deriv*eps with eps^2 = 0; components may be arrays."""

    __slots__ = ("value", "deriv")

    def __init__(self, value: Scalar, deriv: Scalar):
        self.value = value
        self.deriv = deriv

    @staticmethod
    def _lift(other: Dual | float) -> Dual:
        return other if isinstance(other, Dual) else Dual(other, 0.0)

    def __add__(self, other: Dual | float) -> Dual:
        o = self._lift(other)
        return Dual(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __sub__(self, other: Dual | float) -> Dual:
        o = self._lift(other)
        return Dual(self.value - o.value, self.deriv - o.deriv)

    def __rsub__(self, other: Dual | float) -> Dual:
        return self._lift(other) - self

    def __neg__(self) -> Dual:
        return Dual(-self.value, -self.deriv)

    def __mul__(self, other: Dual | float) -> Dual:
        o = self._lift(other)
        return Dual(self.value * o.value, self.deriv * o.value + self.value * o.deriv)

    __rmul__ = __mul__

    def __truediv__(self, other: Dual | float) -> Dual:
        o = self._lift(other)
        value = self.value / o.value
        return Dual(value, (self.deriv - value * o.deriv) / o.value)

    def __rtruediv__(self, other: Dual | float) -> Dual:
        return self._lift(other) / self

    def __pow__(self, power: float) -> Dual:
        if power == 0:
            return Dual(np.ones_like(self.value), np.zeros_like(self.deriv))
        return Dual(self.value**power, power * self.value ** (power - 1) * self.deriv)

    def __repr__(self) -> str:
        return f"Dual({self.value!r}, {self.deriv!r})"


def _apply(name: str, a: Dual) -> Dual:
    v = a.value
    match name:
        case "sin":
            return Dual(np.sin(v), np.cos(v) * a.deriv)
        case "cos":
            return Dual(np.cos(v), -np.sin(v) * a.deriv)
        case "exp":
            ev = np.exp(v)
            return Dual(ev, ev * a.deriv)
        case "log":
            return Dual(np.log(v), a.deriv / v)
        case "sqrt":
            root = np.sqrt(v)
            return Dual(root, 0.5 * a.deriv / root)
        case "tanh":
            t = np.tanh(v)
            return Dual(t, (1.0 - t * t) * a.deriv)
    raise ValueError(f"Unknown function {name!r}")


def _check(result: Dual, node: Expr) -> Dual:
    if not (np.all(np.isfinite(result.value)) and np.all(np.isfinite(result.deriv))):
        raise DomainError(f"Non-finite value in {format_expr(node)}")
    return result


def evaluate(node: Expr, x: Dual) -> Dual:
    """Evaluate an AST on a dual number, raising DomainError on non-finite steps."""
    with np.errstate(all="ignore"):
        return _evaluate(node, x)


def _evaluate(node: Expr, x: Dual) -> Dual:
    match node:
        case Var():
            return x
        case Num(value=value):
            return Dual(value, 0.0)
        case Const(name=name):
            return Dual(CONSTANTS[name], 0.0)
        case Unary(op="neg", arg=arg):
            return -_evaluate(arg, x)
        case Unary(op=op, arg=arg):
            return _check(_apply(op, _evaluate(arg, x)), node)
        case Binary(op=op, left=left, right=right):
            a, b = _evaluate(left, x), _evaluate(right, x)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            return _check(a / b, node)
        case Pow(base=base, exponent=exponent):
            return _check(_evaluate(base, x) ** exponent, node)
    raise TypeError(f"Not an expression node: {node!r}")
