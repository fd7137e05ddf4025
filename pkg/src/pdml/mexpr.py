"""Parser and jet evaluator for user-defined mass expressions m(x).

Grammar (whitespace-insensitive, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds above unary minus
    atom   := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := exp | ln | sqrt | sin | cos | sinh | cosh

Error positions are 1-based byte offsets into the source text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple, Union

from .numerics import (
    Jet3,
    jet_cos,
    jet_cosh,
    jet_exp,
    jet_log,
    jet_pow,
    jet_sin,
    jet_sinh,
    jet_sqrt,
)

__all__ = ["MassExpr", "MassExprError", "ParseError", "EvalError", "parse", "to_text", "eval_jet"]

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "sinh", "cosh")


class MassExprError(Exception):
    pass


class ParseError(MassExprError):
    def __init__(self, message: str, offset: int, expected: Tuple[str, ...] = ()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += " (expected " + ", ".join(expected) + ")"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class EvalError(MassExprError):
    pass


# AST nodes --------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class MassExpr:
    """Parsed mass expression together with its source text."""

    ast: Node
    source_text: str


# Tokenizer ---------------------------------------------------------------

_Token = Tuple[str, str, int]  # kind, text, 1-based offset


def _tokenize(text: str) -> Iterator[_Token]:
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^()":
            yield (c, c, i + 1)
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                float(lit)
            except ValueError:
                raise ParseError(f"malformed number {lit!r}", i + 1, ("number",)) from None
            yield ("num", lit, i + 1)
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            yield ("ident", text[i:j], i + 1)
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i + 1)
    yield ("end", "", n + 1)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected {tok[1]!r}" if tok[0] != "end" else "unexpected end of input",
                             tok[2], (kind,))
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2], ("end of input",))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            node = BinOp("^", node, self.unary())
        return node

    def atom(self) -> Node:
        tok = self.peek()
        kind, text, offset = tok
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if text == "x":
                return Var()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", offset, ("x",) + FUNCTIONS)
        if kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text!r}" if kind != "end" else "unexpected end of input",
                         offset, ("number", "x", "(", "function"))


def parse(text: str) -> MassExpr:
    """Parse an expression over x; raises ParseError with a 1-based offset."""
    return MassExpr(_Parser(text).parse(), text)


# Printer -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _print(node: Node) -> str:
    if isinstance(node, Num):
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        inner = _print(node.arg)
        if _prec(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({_print(node.arg)})"
    lhs, rhs = _print(node.left), _print(node.right)
    p = _PREC[node.op]
    # ^ is right-associative (parenthesize an equal-precedence left operand);
    # the rest parse left-associatively (parenthesize equal precedence on the
    # right so the tree shape survives a round trip)
    if _prec(node.left) < p or (node.op == "^" and _prec(node.left) == p):
        lhs = f"({lhs})"
    if _prec(node.right) < p or (node.op != "^" and _prec(node.right) == p):
        rhs = f"({rhs})"
    return f"{lhs}{node.op}{rhs}"


def to_text(expr: MassExpr | Node) -> str:
    """Serialize; parse(to_text(e)) reproduces the AST."""
    node = expr.ast if isinstance(expr, MassExpr) else expr
    return _print(node)


# Jet evaluation ----------------------------------------------------------


def _require_positive(j: Jet3, what: str) -> Jet3:
    if j.v0.imag != 0.0 or j.v0.real <= 0.0:
        raise EvalError(f"{what} of non-positive value {j.v0}")
    return j


def _eval(node: Node, x_jet: Jet3) -> Jet3:
    if isinstance(node, Num):
        return Jet3.const(node.value)
    if isinstance(node, Var):
        return x_jet
    if isinstance(node, Neg):
        return -_eval(node.arg, x_jet)
    if isinstance(node, Call):
        arg = _eval(node.arg, x_jet)
        if node.func == "exp":
            if arg.v0.real > 709.0:
                raise EvalError(f"exp overflow at argument {arg.v0}")
            return jet_exp(arg)
        if node.func == "ln":
            return jet_log(_require_positive(arg, "ln"))
        if node.func == "sqrt":
            return jet_sqrt(_require_positive(arg, "sqrt"))
        if node.func == "sin":
            return jet_sin(arg)
        if node.func == "cos":
            return jet_cos(arg)
        if node.func == "sinh":
            return jet_sinh(arg)
        return jet_cosh(arg)
    left = _eval(node.left, x_jet)
    if node.op == "^":
        expo = _eval(node.right, x_jet)
        if expo.v1 == 0 and expo.v2 == 0 and expo.v3 == 0:
            p = expo.v0.real
            if p.is_integer():
                if left.v0 == 0 and p < 0:
                    raise EvalError("division by zero in negative power")
                return jet_pow(left, int(p))
            return jet_pow(_require_positive(left, "non-integer power"), p)
        return jet_exp(expo * jet_log(_require_positive(left, "variable power")))
    right = _eval(node.right, x_jet)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.v0 == 0:
        raise EvalError("division by zero")
    return left / right


def eval_jet(expr: MassExpr, x: float) -> Jet3:
    """Value and derivatives to order 3 at real x, seeded with (x, 1, 0, 0)."""
    try:
        out = _eval(expr.ast, Jet3.seed(x))
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvalError(f"evaluation failed at x={x}: {exc}") from exc
    for v in (out.v0, out.v1, out.v2, out.v3):
        if not (abs(v.real) < 1e308 and abs(v.imag) < 1e308):
            raise EvalError(f"evaluation overflow at x={x}")
    return out
