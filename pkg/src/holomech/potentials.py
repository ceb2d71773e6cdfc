"""Entire analytic potentials v(z): parsing, evaluation, exact differentiation.

The expression grammar admits only entire functions of the complex variable
``z``: polynomials, exp/sin/cos/sinh/cosh, sums, products, and quotients by
constants.  Constructs that would introduce a branch cut or a pole (sqrt,
log, fractional or negative powers of z, division by a z-dependent
expression) are rejected at parse time instead of being handled, so every
accepted expression satisfies the Cauchy-Riemann conditions everywhere.

Grammar (whitespace insignificant, numbers are decimal literals)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' integer)?
    base   := number | 'i' | 'z' | func '(' expr ')' | '(' expr ')' | '-' base
    func   := 'exp' | 'sin' | 'cos' | 'sinh' | 'cosh'

AST nodes are frozen dataclasses; structural equality is decidable and all
values are immutable after construction, so expressions can be shared
freely across worker threads.  Node constructors fold purely numeric
subtrees and neutral elements, and nothing else, which keeps structural
equality predictable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "PotentialError",
    "PotentialSyntaxError",
    "UnsupportedFunctionError",
    "PotentialOverflowError",
    "Expr",
    "Const",
    "Z",
    "Sum",
    "Product",
    "Quotient",
    "Power",
    "Neg",
    "Call",
    "parse_potential",
    "to_source",
    "eval_potential",
    "compile_potential",
    "derivative",
    "split_real_imag",
    "cauchy_riemann_residual",
    "BUILTIN_SOURCES",
    "builtin_potentials",
    "get_builtin",
]


class PotentialError(ValueError):
    """Base class for potential parsing and evaluation failures."""


class PotentialSyntaxError(PotentialError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnsupportedFunctionError(PotentialError):
    """Construct that is not an entire function of z.

    Non-entire potentials (sqrt, log, fractional powers, poles) would force
    trajectories to track branch cuts; they are rejected outright.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PotentialOverflowError(PotentialError):
    """Evaluation left the range of double precision (e.g. exp of a large argument)."""


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class Z(Expr):
    """The complex variable z."""


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Product(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Quotient(Expr):
    # Denominator is always a non-zero constant: quotients by z-dependent
    # expressions are rejected at parse time (they are not entire).
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


_ENTIRE_FUNCS: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
}

# Recognized names that are *not* entire, so the error can explain why.
_NON_ENTIRE_FUNCS = {
    "sqrt", "log", "ln", "log10", "tan", "cot", "sec", "csc",
    "tanh", "coth", "sech", "csch", "asin", "acos", "atan",
    "asinh", "acosh", "atanh", "abs", "arg", "conj", "re", "im",
}

_ZERO = complex(0.0)
_ONE = complex(1.0)


def _contains_z(e: Expr) -> bool:
    match e:
        case Z():
            return True
        case Const():
            return False
        case Sum(l, r) | Product(l, r) | Quotient(l, r):
            return _contains_z(l) or _contains_z(r)
        case Power(b, _):
            return _contains_z(b)
        case Neg(a) | Call(_, a):
            return _contains_z(a)
    raise TypeError(f"not an expression node: {e!r}")


# Smart constructors: fold constants and neutral elements so that parser
# output and symbolic derivatives stay compact and structurally predictable.

def make_sum(left: Expr, right: Expr) -> Expr:
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(left.value + right.value)
    if isinstance(left, Const) and left.value == _ZERO:
        return right
    if isinstance(right, Const) and right.value == _ZERO:
        return left
    return Sum(left, right)


def make_product(left: Expr, right: Expr) -> Expr:
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(left.value * right.value)
    if isinstance(left, Const):
        if left.value == _ZERO:
            return Const(_ZERO)
        if left.value == _ONE:
            return right
    if isinstance(right, Const):
        if right.value == _ZERO:
            return Const(_ZERO)
        if right.value == _ONE:
            return left
    return Product(left, right)


def make_quotient(num: Expr, den: Expr) -> Expr:
    if not isinstance(den, Const):
        if _contains_z(den):
            raise UnsupportedFunctionError(
                "division by a z-dependent expression introduces poles; "
                "only quotients by constants are entire")
        # z-free subtrees fold to a constant unless folding overflowed
        raise PotentialOverflowError(
            "constant denominator overflows double precision")
    if den.value == _ZERO:
        raise ZeroDivisionError("division by zero constant")
    if isinstance(num, Const):
        return Const(num.value / den.value)
    if den.value == _ONE:
        return num
    return Quotient(num, den)


def make_power(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return Const(_ONE)
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if exponent < 0 and base.value == _ZERO:
            raise ZeroDivisionError("zero raised to a negative power")
        return Const(base.value ** exponent)
    if exponent < 0:
        raise UnsupportedFunctionError(
            "negative power of a z-dependent expression has a pole and is not entire")
    return Power(base, exponent)


def make_neg(arg: Expr) -> Expr:
    if isinstance(arg, Const):
        return Const(-arg.value)
    if isinstance(arg, Neg):
        return arg.arg
    return Neg(arg)


def make_call(func: str, arg: Expr) -> Expr:
    if func not in _ENTIRE_FUNCS:
        raise UnsupportedFunctionError(f"unknown entire function {func!r}")
    if isinstance(arg, Const):
        try:
            return Const(_ENTIRE_FUNCS[func](arg.value))
        except OverflowError:
            pass  # leave unfolded; overflow surfaces at evaluation time
    return Call(func, arg)


# --------------------------------------------------------------------------
# Tokenizer and recursive-descent parser
# --------------------------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(("number", float(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
        else:
            raise PotentialSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> tuple[str, object, int]:
        return self.tokens[self.pos]

    def _next(self) -> tuple[str, object, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _match_op(self, chars: str) -> str | None:
        kind, value, _ = self._peek()
        if kind == "op" and value in chars:
            self.pos += 1
            return value  # type: ignore[return-value]
        return None

    def _expect_op(self, char: str) -> None:
        kind, value, pos = self._next()
        if kind != "op" or value != char:
            raise PotentialSyntaxError(f"expected {char!r}", pos)

    def parse(self) -> Expr:
        node = self.expr()
        kind, _, pos = self._peek()
        if kind != "end":
            raise PotentialSyntaxError("unexpected trailing input", pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (op := self._match_op("+-")) is not None:
            rhs = self.term()
            node = make_sum(node, rhs if op == "+" else make_neg(rhs))
        return node

    def term(self) -> Expr:
        node = self.factor()
        while (op := self._match_op("*/")) is not None:
            _, _, pos = self._peek()
            rhs = self.factor()
            if op == "*":
                node = make_product(node, rhs)
            else:
                if _contains_z(rhs):
                    raise UnsupportedFunctionError(
                        "division by a z-dependent expression introduces poles; "
                        "only quotients by constants are entire", pos)
                try:
                    node = make_quotient(node, rhs)
                except ZeroDivisionError:
                    raise PotentialSyntaxError("division by zero", pos) from None
        return node

    def factor(self) -> Expr:
        node = self.base()
        if self._match_op("^"):
            sign = 1
            if self._match_op("-"):
                sign = -1
            kind, value, pos = self._next()
            if kind != "number":
                raise PotentialSyntaxError("expected integer exponent after '^'", pos)
            if not float(value).is_integer():  # type: ignore[arg-type]
                raise UnsupportedFunctionError(
                    "fractional power is not entire (it has a branch cut)", pos)
            exponent = sign * int(value)  # type: ignore[arg-type]
            if exponent < 0 and not isinstance(node, Const):
                raise UnsupportedFunctionError(
                    "negative power of a z-dependent expression has a pole "
                    "and is not entire", pos)
            try:
                node = make_power(node, exponent)
            except ZeroDivisionError:
                raise PotentialSyntaxError("zero raised to a negative power", pos) from None
        return node

    def base(self) -> Expr:
        kind, value, pos = self._next()
        if kind == "number":
            return Const(complex(value))  # type: ignore[arg-type]
        if kind == "name":
            name = value  # type: ignore[assignment]
            if name == "i":
                return Const(1j)
            if name == "z":
                return Z()
            if name in _ENTIRE_FUNCS:
                self._expect_op("(")
                arg = self.expr()
                self._expect_op(")")
                return make_call(name, arg)  # type: ignore[arg-type]
            if name in _NON_ENTIRE_FUNCS:
                raise UnsupportedFunctionError(
                    f"{name!r} is not an entire function of z: it introduces "
                    "branch cuts or poles, which this package does not handle", pos)
            raise PotentialSyntaxError(f"unknown identifier {name!r}", pos)
        if kind == "op":
            if value == "(":
                node = self.expr()
                self._expect_op(")")
                return node
            if value == "-":
                return make_neg(self.base())
        raise PotentialSyntaxError("expected a number, 'i', 'z', function call, "
                                   "parenthesized expression, or unary minus", pos)


def parse_potential(text: str) -> Expr:
    """Parse expression text into an AST of an entire function of z."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing (inverse of the parser up to constant folding)
# --------------------------------------------------------------------------


def _real_source(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot render non-finite constant {x!r}")
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _const_source(c: complex) -> str:
    re, im = c.real, c.imag
    if im == 0.0:
        return _real_source(re) if re >= 0 else f"-{_real_source(-re)}"
    if re == 0.0:
        if im == 1.0:
            return "i"
        if im == -1.0:
            return "-i"
        head = _real_source(im) if im >= 0 else f"-{_real_source(-im)}"
        return f"{head}*i"
    im_part = "i" if abs(im) == 1.0 else f"{_real_source(abs(im))}*i"
    sign = "+" if im >= 0 else "-"
    re_part = _real_source(re) if re >= 0 else f"-{_real_source(-re)}"
    return f"({re_part}{sign}{im_part})"


def _self_delimiting(e: Expr) -> bool:
    """True when the rendered source can sit anywhere a 'base' can.

    Z, calls, and constants that render as a bare atom ("2", "i") or as an
    already-parenthesized complex literal qualify; constants rendering with
    a leading minus or an embedded '*' (e.g. "2*i") do not.
    """
    if isinstance(e, (Z, Call)):
        return True
    if isinstance(e, Const):
        src = _const_source(e.value)
        return src.startswith("(") or (not src.startswith("-") and "*" not in src)
    return False


def _delimited(e: Expr) -> str:
    src = to_source(e)
    return src if _self_delimiting(e) else f"({src})"


def to_source(e: Expr) -> str:
    """Render an AST back to grammar-conformant text.

    ``parse_potential(to_source(e))`` is structurally equal to ``e`` for any
    AST built through the node constructors.
    """
    match e:
        case Const(value):
            return _const_source(value)
        case Z():
            return "z"
        case Call(func, arg):
            return f"{func}({to_source(arg)})"
        case Neg(arg):
            return f"-{_delimited(arg)}"
        case Sum(left, right):
            left_src = to_source(left)
            if isinstance(right, Neg):
                # print as subtraction; the minus binds the whole next term
                return f"{left_src}-{_delimited(right.arg)}"
            right_src = to_source(right)
            if right_src.startswith("-"):  # negative constant
                return f"{left_src}-{_delimited(make_neg(right))}"
            if isinstance(right, Sum):
                return f"{left_src}+({right_src})"
            return f"{left_src}+{right_src}"
        case Product(left, right) | Quotient(left, right):
            op = "*" if isinstance(e, Product) else "/"
            ls = f"({to_source(left)})" if isinstance(left, Sum) else to_source(left)
            rs = to_source(right) if isinstance(right, Power) else _delimited(right)
            return f"{ls}{op}{rs}"
        case Power(base, exponent):
            base_src = to_source(base)
            if not isinstance(base, (Z, Call)):
                base_src = f"({base_src})"
            return f"{base_src}^{exponent}"
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# Evaluation and exact differentiation
# --------------------------------------------------------------------------


def _eval(e: Expr, z: complex) -> complex:
    match e:
        case Const(value):
            return value
        case Z():
            return z
        case Sum(l, r):
            return _eval(l, z) + _eval(r, z)
        case Product(l, r):
            return _eval(l, z) * _eval(r, z)
        case Quotient(n, d):
            return _eval(n, z) / _eval(d, z)
        case Power(b, n):
            return _eval(b, z) ** n
        case Neg(a):
            return -_eval(a, z)
        case Call(f, a):
            return _ENTIRE_FUNCS[f](_eval(a, z))
    raise TypeError(f"not an expression node: {e!r}")


def eval_potential(e: Expr, z: complex) -> complex:
    """Evaluate v(z) in double-precision complex arithmetic.

    Raises PotentialOverflowError if the result leaves the finite range.
    """
    try:
        value = _eval(e, complex(z))
    except OverflowError as exc:
        raise PotentialOverflowError(f"overflow evaluating potential at z={z!r}") from exc
    if not (cmath.isfinite(value)):
        raise PotentialOverflowError(f"non-finite potential value at z={z!r}")
    return value


def compile_potential(e: Expr) -> Callable[[complex], complex]:
    """Build a fast closure computing the same floating-point operations as
    eval_potential, without the finiteness check (callers on hot paths handle
    OverflowError and non-finite values themselves)."""
    match e:
        case Const(value):
            return lambda z, _v=value: _v
        case Z():
            return lambda z: z
        case Sum(l, r):
            fl, fr = compile_potential(l), compile_potential(r)
            return lambda z: fl(z) + fr(z)
        case Product(l, r):
            fl, fr = compile_potential(l), compile_potential(r)
            return lambda z: fl(z) * fr(z)
        case Quotient(n, d):
            fn, fd = compile_potential(n), compile_potential(d)
            return lambda z: fn(z) / fd(z)
        case Power(b, n):
            fb = compile_potential(b)
            return lambda z, _n=n: fb(z) ** _n
        case Neg(a):
            fa = compile_potential(a)
            return lambda z: -fa(z)
        case Call(f, a):
            fa = compile_potential(a)
            fn = _ENTIRE_FUNCS[f]
            return lambda z: fn(fa(z))
    raise TypeError(f"not an expression node: {e!r}")


_CALL_DERIVS: dict[str, Callable[[Expr], Expr]] = {
    "exp": lambda a: make_call("exp", a),
    "sin": lambda a: make_call("cos", a),
    "cos": lambda a: make_neg(make_call("sin", a)),
    "sinh": lambda a: make_call("cosh", a),
    "cosh": lambda a: make_call("sinh", a),
}


def derivative(e: Expr) -> Expr:
    """Exact symbolic derivative dv/dz.

    The dynamics integrators evaluate dv/dz at every step; a symbolic
    derivative keeps conservation checks free of finite-difference noise.
    """
    match e:
        case Const():
            return Const(_ZERO)
        case Z():
            return Const(_ONE)
        case Sum(l, r):
            return make_sum(derivative(l), derivative(r))
        case Product(l, r):
            return make_sum(make_product(derivative(l), r),
                            make_product(l, derivative(r)))
        case Quotient(n, d):
            return make_quotient(derivative(n), d)
        case Power(b, n):
            return make_product(make_product(Const(complex(n)), make_power(b, n - 1)),
                                derivative(b))
        case Neg(a):
            return make_neg(derivative(a))
        case Call(f, a):
            return make_product(_CALL_DERIVS[f](a), derivative(a))
    raise TypeError(f"not an expression node: {e!r}")


def split_real_imag(e: Expr, x: float, y: float) -> tuple[float, float]:
    """Return (v_r, v_i), the real and imaginary parts of v(x + i y)."""
    v = eval_potential(e, complex(x, y))
    return v.real, v.imag


def cauchy_riemann_residual(e: Expr, x: float, y: float,
                            step: float) -> tuple[float, float]:
    """Central-difference residuals of the Cauchy-Riemann conditions.

    Returns (d_x v_r - d_y v_i, d_y v_r + d_x v_i); both vanish (up to the
    O(step^2) truncation of the differences) for an analytic potential.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    vr_xp, vi_xp = split_real_imag(e, x + step, y)
    vr_xm, vi_xm = split_real_imag(e, x - step, y)
    vr_yp, vi_yp = split_real_imag(e, x, y + step)
    vr_ym, vi_ym = split_real_imag(e, x, y - step)
    dvr_dx = (vr_xp - vr_xm) / (2.0 * step)
    dvr_dy = (vr_yp - vr_ym) / (2.0 * step)
    dvi_dx = (vi_xp - vi_xm) / (2.0 * step)
    dvi_dy = (vi_yp - vi_ym) / (2.0 * step)
    return dvr_dx - dvi_dy, dvr_dy + dvi_dx


# --------------------------------------------------------------------------
# Built-in potential catalog
# --------------------------------------------------------------------------

# The six stock potentials used throughout the verification suite.
BUILTIN_SOURCES: dict[str, str] = {
    "iz": "i*z",
    "z2": "z^2",
    "iz3": "i*z^3",
    "neg_z4": "-(z^4)",
    "exp_iz": "exp(i*z)",
    "i_sin_z": "i*sin(z)",
}

_builtin_cache: dict[str, Expr] | None = None


def builtin_potentials() -> dict[str, Expr]:
    """Name -> AST for the six built-in potentials, in catalog order."""
    global _builtin_cache
    if _builtin_cache is None:
        _builtin_cache = {name: parse_potential(src)
                          for name, src in BUILTIN_SOURCES.items()}
    return dict(_builtin_cache)


def get_builtin(name: str) -> Expr:
    table = builtin_potentials()
    if name not in table:
        raise KeyError(f"unknown builtin potential {name!r}; "
                       f"available: {', '.join(table)}")
    return table[name]
