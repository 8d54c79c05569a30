"""Parser and series compiler for curve component expressions.

Expressions are written in one variable ``t`` with the grammar

    expr   := term (('+' | '-') term)*
    term   := power (('*' | '/') power)*
    power  := signed ('^' INT)*
    signed := '-' signed | atom
    atom   := NUMBER | 't' | NAME '(' expr ')' | '(' expr ')'

so unary minus binds tighter than '^', which binds tighter than '*'
and '/'.  Known functions: sin, cos, exp, sinh, cosh.  Numbers are
decimal literals with an optional exponent.  Lowering compiles an
expression to a ``PowerSeries`` around any center; differentiation is
done on series afterwards, never on the AST.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .series import DEFAULT_ORDER, DivisionBySingularSeries, PowerSeries, divide

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Call",
    "ExprSyntaxError",
    "UnknownFunction",
    "ArityError",
    "LoweringError",
    "CurveFileError",
    "CurveFileSpec",
    "FUNCTIONS",
    "parse",
    "pretty",
    "evaluate",
    "lower",
    "parse_curve_file",
]

FUNCTIONS = ("sin", "cos", "exp", "sinh", "cosh")

GENERATOR_TRUST = 1.0  # trusted evaluation radius for transcendental expansions


# ----------------------------------------------------------------------
# errors


class ExprSyntaxError(Exception):
    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.offset = offset
        self.expected = tuple(expected)
        hint = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {offset}{hint}")


class UnknownFunction(Exception):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(
            f"unknown function {name!r} at offset {offset}; "
            f"known functions: {', '.join(FUNCTIONS)}"
        )


class ArityError(Exception):
    def __init__(self, name: str, offset: int, detail: str):
        self.name = name
        self.offset = offset
        super().__init__(f"bad argument list for {name!r} at offset {offset}: {detail}")


class LoweringError(Exception):
    pass


# ----------------------------------------------------------------------
# AST


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr


# ----------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            where = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {text[where]!r}", where)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind == "op" and val == op:
            return self.advance()
        raise ExprSyntaxError(f"got {val!r}" if val else "unexpected end of input", off, (op,))

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {val!r}", off)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                e = Add(e, rhs) if val == "+" else Sub(e, rhs)
            else:
                return e

    def term(self) -> Expr:
        e = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.power()
                e = Mul(e, rhs) if val == "*" else Div(e, rhs)
            else:
                return e

    def power(self) -> Expr:
        e = self.signed()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "^":
                self.advance()
                e = Pow(e, self.int_literal())
            else:
                return e

    def int_literal(self) -> int:
        kind, val, off = self.peek()
        if kind != "num":
            raise ExprSyntaxError("power exponent must be an integer literal", off, ("integer",))
        if not re.fullmatch(r"\d+", val):
            raise ExprSyntaxError(
                f"power exponent must be a non-negative integer, got {val!r}", off
            )
        self.advance()
        return int(val)

    def signed(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            inner = self.signed()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Sub(Const(0.0), inner)
        return self.atom()

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "(":
                if val not in FUNCTIONS:
                    raise UnknownFunction(val, off)
                self.advance()
                k3, v3, _ = self.peek()
                if k3 == "op" and v3 == ")":
                    raise ArityError(val, off, "expected exactly one argument, got none")
                arg = self.expr()
                k4, v4, off4 = self.peek()
                if k4 == "op" and v4 == ",":
                    raise ArityError(val, off, "expected exactly one argument")
                self.expect_op(")")
                return Call(val, arg)
            if val == "t":
                return Var()
            raise ExprSyntaxError(
                f"unknown identifier {val!r}; the only variable is 't'", off
            )
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"got {val!r}" if val else "unexpected end of input",
            off,
            ("number", "t", "function", "("),
        )


def parse(text: str) -> Expr:
    """Parse an expression in the variable t into an AST."""
    return _Parser(text).parse()


# ----------------------------------------------------------------------
# pretty printer (inverse of parse up to structural equality)

_PREC = {"add": 1, "mul": 2, "pow": 3, "atom": 4}


def _fmt_num(v: float) -> str:
    return repr(v) if v >= 0 else f"({v!r})"


def _pp(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        if e.value < 0:
            return f"-{abs(e.value)!r}", _PREC["mul"]
        return repr(e.value), _PREC["atom"]
    if isinstance(e, Var):
        return "t", _PREC["atom"]
    if isinstance(e, Add):
        a, _ = _wrap(e.a, _PREC["add"])
        b, _ = _wrap(e.b, _PREC["add"] + 1)
        return f"{a} + {b}", _PREC["add"]
    if isinstance(e, Sub):
        if e.a == Const(0.0):
            b, _ = _wrap(e.b, _PREC["pow"] + 1)
            return f"-{b}", _PREC["mul"]
        a, _ = _wrap(e.a, _PREC["add"])
        b, _ = _wrap(e.b, _PREC["add"] + 1)
        return f"{a} - {b}", _PREC["add"]
    if isinstance(e, Mul):
        a, _ = _wrap(e.a, _PREC["mul"])
        b, _ = _wrap(e.b, _PREC["mul"] + 1)
        return f"{a} * {b}", _PREC["mul"]
    if isinstance(e, Div):
        a, _ = _wrap(e.a, _PREC["mul"])
        b, _ = _wrap(e.b, _PREC["mul"] + 1)
        return f"{a} / {b}", _PREC["mul"]
    if isinstance(e, Pow):
        a, _ = _wrap(e.base, _PREC["atom"])
        return f"{a}^{e.exponent}", _PREC["pow"]
    if isinstance(e, Call):
        inner, _ = _pp(e.arg)
        return f"{e.name}({inner})", _PREC["atom"]
    raise TypeError(f"not an Expr: {e!r}")


def _wrap(e: Expr, min_prec: int) -> tuple[str, int]:
    s, p = _pp(e)
    if p < min_prec:
        return f"({s})", _PREC["atom"]
    return s, _PREC["atom"]


def pretty(e: Expr) -> str:
    """Render an AST as text that re-parses to a structurally equal AST."""
    return _pp(e)[0]


# ----------------------------------------------------------------------
# direct interpretation (reference semantics for lowering)


def evaluate(e: Expr, x):
    """Evaluate the AST directly at a real or complex argument."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Add):
        return evaluate(e.a, x) + evaluate(e.b, x)
    if isinstance(e, Sub):
        return evaluate(e.a, x) - evaluate(e.b, x)
    if isinstance(e, Mul):
        return evaluate(e.a, x) * evaluate(e.b, x)
    if isinstance(e, Div):
        return evaluate(e.a, x) / evaluate(e.b, x)
    if isinstance(e, Pow):
        return evaluate(e.base, x) ** e.exponent
    if isinstance(e, Call):
        fn = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sinh": np.sinh, "cosh": np.cosh}[
            e.name
        ]
        return fn(evaluate(e.arg, x))
    raise TypeError(f"not an Expr: {e!r}")


# ----------------------------------------------------------------------
# lowering to power series


def _taylor_coeffs(name: str, a0: float, order: int) -> np.ndarray:
    """Taylor coefficients of a known function around a0, up to ``order``."""
    k = np.arange(order + 1)
    if name == "exp":
        vals = np.full(order + 1, math.exp(a0))
    elif name == "sin":
        cycle = np.array([math.sin(a0), math.cos(a0), -math.sin(a0), -math.cos(a0)])
        vals = cycle[k % 4]
    elif name == "cos":
        cycle = np.array([math.cos(a0), -math.sin(a0), -math.cos(a0), math.sin(a0)])
        vals = cycle[k % 4]
    elif name == "sinh":
        vals = np.where(k % 2 == 0, math.sinh(a0), math.cosh(a0))
    elif name == "cosh":
        vals = np.where(k % 2 == 0, math.cosh(a0), math.sinh(a0))
    else:
        raise LoweringError(f"no Taylor generator for function {name!r}")
    fact = np.cumprod(np.concatenate(([1.0], np.arange(1.0, order + 1))))
    return vals / fact


def _composition_trust(inner: PowerSeries) -> float:
    """Largest radius r with sum_{k>=1} |b_k| r^k <= GENERATOR_TRUST.

    Bounds how far the composed expansion may be evaluated: within that
    disk the inner series stays inside the outer generator's trusted
    expansion region.
    """
    tail = np.abs(inner.coeffs[1:])
    if not np.any(tail > 0):
        return math.inf
    hi = 1.0
    budget = GENERATOR_TRUST

    def excursion(r):
        return float(np.polyval(tail[::-1], r) * r)

    while excursion(hi) < budget and hi < 1e12:
        hi *= 2.0
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if excursion(mid) <= budget:
            lo = mid
        else:
            hi = mid
    return min(lo, inner.trust_radius) if lo > 0 else min(1e-6, inner.trust_radius)


def _compose_call(name: str, inner: PowerSeries, order: int) -> PowerSeries:
    a0 = float(inner.coeffs[0])
    outer = _taylor_coeffs(name, a0, order)
    u = inner.coeffs.copy()
    u[0] = 0.0
    if not np.any(u != 0):
        return PowerSeries(inner.center, [outer[0]])
    # Horner composition with per-step truncation at the requested order
    acc = np.array([outer[-1]])
    for k in range(order - 1, -1, -1):
        acc = np.convolve(acc, u)[: order + 1]
        acc[0] += outer[k]
    trust = _composition_trust(inner)
    return PowerSeries(inner.center, acc, trust)


def lower(e: Expr, center: float, order: int = DEFAULT_ORDER) -> PowerSeries:
    """Compile an expression to a power series around ``center``.

    The result carries at least ``order + 1`` coefficients (an exact
    polynomial of higher degree keeps its full length).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    s = _lower(e, center, order)
    if s.order < order:
        s = s.padded(order)
    return s


def _lower(e: Expr, center: float, order: int) -> PowerSeries:
    if isinstance(e, Const):
        return PowerSeries.constant(e.value, center)
    if isinstance(e, Var):
        return PowerSeries.variable(center).truncated(max(order, 1))
    if isinstance(e, Add):
        return _lower(e.a, center, order) + _lower(e.b, center, order)
    if isinstance(e, Sub):
        return _lower(e.a, center, order) - _lower(e.b, center, order)
    if isinstance(e, Mul):
        return _lower(e.a, center, order) * _lower(e.b, center, order)
    if isinstance(e, Div):
        try:
            return divide(_lower(e.a, center, order), _lower(e.b, center, order))
        except DivisionBySingularSeries as exc:
            raise LoweringError(
                f"division by a series vanishing at center {center:g}: {exc}"
            ) from exc
    if isinstance(e, Pow):
        if e.exponent == 0:
            return PowerSeries.constant(1.0, center)
        base = _lower(e.base, center, order)
        out = None
        b = base
        n = e.exponent
        while n:
            if n & 1:
                out = b if out is None else out * b
            if n > 1:
                b = b * b
            n >>= 1
        return out
    if isinstance(e, Call):
        return _compose_call(e.name, _lower(e.arg, center, order), order)
    raise TypeError(f"not an Expr: {e!r}")


# ----------------------------------------------------------------------
# curve definition files
#
# Line-oriented key/value text.  '#' starts a comment.  Keys:
#   gamma    = ["expr1", "expr2", "expr3"]
#   L        = ["expr1", "expr2", "expr3"]   or   "zero"
#   interval = [a, b]
# The literal "zero" produces an exactly-zero field, so downstream
# folded-singularity detection is exact rather than tolerance-based.


class CurveFileError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}")


@dataclass(frozen=True)
class CurveFileSpec:
    gamma_text: tuple[str, str, str]
    gamma: tuple[Expr, Expr, Expr]
    l_text: tuple[str, ...] | str
    l_field: tuple[Expr, Expr, Expr] | None  # None means exactly zero
    interval: tuple[float, float]


class _ValueReader:
    def __init__(self, line: str, lineno: int, start: int):
        self.line = line
        self.lineno = lineno
        self.pos = start

    def error(self, msg: str):
        raise CurveFileError(msg, self.lineno, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.line) or self.line[self.pos] == "#"

    def read_value(self):
        self.skip_ws()
        if self.pos >= len(self.line):
            self.error("missing value")
        ch = self.line[self.pos]
        if ch == "[":
            return self.read_array()
        if ch == '"':
            return self.read_string()
        return self.read_number()

    def read_array(self):
        self.pos += 1
        items = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.line):
                self.error("unterminated array, expected ']'")
            if self.line[self.pos] == "]":
                self.pos += 1
                return items
            items.append(self.read_value())
            self.skip_ws()
            if self.pos < len(self.line) and self.line[self.pos] == ",":
                self.pos += 1
            elif self.pos < len(self.line) and self.line[self.pos] == "]":
                continue
            else:
                self.error("expected ',' or ']' in array")

    def read_string(self):
        end = self.line.find('"', self.pos + 1)
        if end < 0:
            self.error("unterminated string")
        s = self.line[self.pos + 1 : end]
        self.pos = end + 1
        return s

    def read_number(self):
        m = re.match(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?", self.line[self.pos :])
        if m is None:
            self.error(f"cannot parse value starting at {self.line[self.pos:][:10]!r}")
        self.pos += m.end()
        return float(m.group(0))


def parse_curve_file(text: str) -> CurveFileSpec:
    """Parse a curve definition file into expressions and an interval."""
    entries: dict[str, object] = {}
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        eq = raw.find("=")
        if eq < 0:
            raise CurveFileError("expected 'key = value'", lineno, 1)
        key = raw[:eq].strip()
        if key not in ("gamma", "L", "interval"):
            raise CurveFileError(
                f"unknown key {key!r} (expected gamma, L or interval)", lineno, 1
            )
        if key in entries:
            raise CurveFileError(f"duplicate key {key!r}", lineno, 1)
        reader = _ValueReader(raw, lineno, eq + 1)
        value = reader.read_value()
        if not reader.at_end():
            reader.error("trailing characters after value")
        entries[key] = (value, lineno, eq + 2)

    for key in ("gamma", "L", "interval"):
        if key not in entries:
            raise CurveFileError(f"missing required key {key!r}", len(lines) + 1, 1)

    def expr_triple(key) -> tuple[tuple, tuple]:
        value, lineno, col = entries[key]
        if not (isinstance(value, list) and len(value) == 3 and all(isinstance(s, str) for s in value)):
            raise CurveFileError(f"{key} must be an array of three expression strings", lineno, col)
        exprs = []
        for s in value:
            try:
                exprs.append(parse(s))
            except (ExprSyntaxError, UnknownFunction, ArityError) as exc:
                raise CurveFileError(f"in {key} component {s!r}: {exc}", lineno, col) from exc
        return tuple(value), tuple(exprs)

    gamma_text, gamma = expr_triple("gamma")

    l_value, l_line, l_col = entries["L"]
    if isinstance(l_value, str):
        if l_value != "zero":
            raise CurveFileError('L must be an array of three expressions or "zero"', l_line, l_col)
        l_text: tuple[str, ...] | str = "zero"
        l_field = None
    else:
        l_text, l_field = expr_triple("L")

    iv, iv_line, iv_col = entries["interval"]
    if not (isinstance(iv, list) and len(iv) == 2 and all(isinstance(x, float) for x in iv)):
        raise CurveFileError("interval must be an array of two numbers", iv_line, iv_col)
    a, b = iv
    if not a < b:
        raise CurveFileError(f"interval must satisfy a < b, got [{a}, {b}]", iv_line, iv_col)

    return CurveFileSpec(gamma_text, gamma, l_text, l_field, (a, b))
