"""Expression language for functions of t.

Grammar (whitespace-insensitive)::

    expr     := term { ("+" | "-") term }
    term     := ["-"] factor { "*" factor }
    factor   := base [ "^" exponent ]
    base     := NUMBER | "t" | FUNC "(" linarg ")" | "(" expr ")"
    FUNC     := exp_l | cos_l | sin_l | cosh_l | sinh_l | log1p_l
    linarg   := [ ["-"] NUMBER "*" ] "t"
    exponent := ["-"] NUMBER

``exp_l(a*t)`` is (1 + lam*t)**(a/lam) and ``log1p_l(t)^n`` is
(ln(1 + lam*t))**n.  The reciprocal 1/(1 + lam*t) has no node of its own;
it is ``DegExp(-lam)``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import degenfun
from .errors import (
    DomainError,
    ExponentOutOfRange,
    ExprSyntaxError,
    NonDifferentiableAtZero,
    NonIntegerLogPower,
    NonLinearArgument,
)


def _finite_param(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value + 0.0  # drops the sign of -0.0


class Expr:
    """Base class of AST nodes; nodes are immutable and hashable."""

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _finite_param("constant", self.c))


@dataclass(frozen=True)
class Power(Expr):
    """t**alpha with alpha > -1."""

    alpha: float

    def __post_init__(self):
        alpha = _finite_param("exponent", self.alpha)
        if not alpha > -1:
            raise DomainError(f"power of t must exceed -1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class _Atom(Expr):
    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _finite_param("coefficient", self.a))


class DegExp(_Atom):
    pass


class CosL(_Atom):
    pass


class SinL(_Atom):
    pass


class CoshL(_Atom):
    pass


class SinhL(_Atom):
    pass


@dataclass(frozen=True)
class LogPow(Expr):
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"log power must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class Sum(Expr):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Prod(Expr):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Scale(Expr):
    c: float
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "c", _finite_param("scale", self.c))


TRIG_ATOMS = (CosL, SinL, CoshL, SinhL)
FUNC_NAMES = {
    "exp_l": DegExp,
    "cos_l": CosL,
    "sin_l": SinL,
    "cosh_l": CoshL,
    "sinh_l": SinhL,
}
_ATOM_NAMES = {cls: name for name, cls in FUNC_NAMES.items()}


# ---------------------------------------------------------------------------
# normalization


def normalize(e: Expr) -> Expr:
    """Canonical form: flat sums/products, merged exponentials, one leading scale."""
    coef, core = _norm(e)
    return _attach(coef, core)


def _attach(coef, core):
    if core is None:
        return Const(coef)
    if coef == 0:
        return Const(0.0)
    if coef == 1:
        return core
    return Scale(coef, core)


def _split(node):
    if isinstance(node, Const):
        return node.c, None
    if isinstance(node, Scale):
        return node.c, node.child
    return 1.0, node


def _norm(e):
    """Return (coefficient, core) with core None meaning the constant 1."""
    if isinstance(e, Const):
        return e.c, None
    if isinstance(e, Power):
        return (1.0, None) if e.alpha == 0 else (1.0, e)
    if isinstance(e, (DegExp, CosL, CoshL)):
        return (1.0, None) if e.a == 0 else (1.0, e)
    if isinstance(e, (SinL, SinhL)):
        return (0.0, None) if e.a == 0 else (1.0, e)
    if isinstance(e, LogPow):
        return (1.0, None) if e.n == 0 else (1.0, e)
    if isinstance(e, Scale):
        c, core = _norm(e.child)
        return e.c * c, core
    if isinstance(e, Prod):
        return _norm_prod(e)
    if isinstance(e, Sum):
        return _norm_sum(e)
    raise TypeError(f"not an expression node: {e!r}")


_RANK = {CosL: 3, SinL: 4, CoshL: 5, SinhL: 6, Sum: 7}


def _factor_key(f):
    if isinstance(f, Sum):
        return (_RANK[Sum], 0.0, _print(f))
    return (_RANK[type(f)], f.a, "")


def _norm_prod(e):
    coef = 1.0
    flat = []
    for child in e.children:
        c, core = _norm(child)
        coef *= c
        if core is None:
            continue
        if isinstance(core, Prod):
            flat.extend(core.children)
        else:
            flat.append(core)
    if coef == 0:
        return 0.0, None
    alpha, shift, logn = 0.0, 0.0, 0
    others = []
    for f in flat:
        if isinstance(f, Power):
            alpha += f.alpha
        elif isinstance(f, DegExp):
            shift += f.a
        elif isinstance(f, LogPow):
            logn += f.n
        else:
            others.append(f)
    factors = []
    if alpha != 0:
        factors.append(Power(alpha))
    if shift != 0:
        factors.append(DegExp(shift))
    if logn:
        factors.append(LogPow(logn))
    factors.extend(sorted(others, key=_factor_key))
    if not factors:
        return coef, None
    if len(factors) == 1:
        return coef, factors[0]
    return coef, Prod(tuple(factors))


def _norm_sum(e):
    const = 0.0
    terms = []
    pending = [_norm(child) for child in e.children]
    pending.reverse()
    while pending:
        c, core = pending.pop()
        if c == 0:
            continue
        if core is None:
            const += c
        elif isinstance(core, Sum) and c == 1:
            # inner sums are already normal; re-split so constants merge here
            pending.extend(_split(g) for g in reversed(core.children))
        else:
            terms.append(_attach(c, core))
    if const != 0:
        terms.append(Const(const))
    if not terms:
        return 0.0, None
    if len(terms) == 1:
        return _split(terms[0])
    return 1.0, Sum(tuple(terms))


# ---------------------------------------------------------------------------
# printing


def _num(x: float) -> str:
    x = float(x) + 0.0
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def to_text(e: Expr) -> str:
    """Canonical text of ``normalize(e)``; parse() reads it back unchanged."""
    return _print(normalize(e))


def _print(e):
    if isinstance(e, Const):
        return _num(e.c)
    if isinstance(e, Power):
        return "t" if e.alpha == 1 else f"t^{_num(e.alpha)}"
    if isinstance(e, _Atom):
        return f"{_ATOM_NAMES[type(e)]}({_num(e.a)}*t)"
    if isinstance(e, LogPow):
        return "log1p_l(t)" if e.n == 1 else f"log1p_l(t)^{e.n}"
    if isinstance(e, Prod):
        return "*".join(_print_factor(f) for f in e.children)
    if isinstance(e, Scale):
        if e.c == -1:
            return "-" + _print_factor(e.child)
        return f"{_num(e.c)}*{_print_factor(e.child)}"
    if isinstance(e, Sum):
        parts = [_print(e.children[0])]
        for term in e.children[1:]:
            if isinstance(term, Scale) and term.c < 0:
                parts.append(" - " + _print(_attach(-term.c, term.child)))
            elif isinstance(term, Const) and term.c < 0:
                parts.append(" - " + _num(-term.c))
            else:
                parts.append(" + " + _print(term))
        return "".join(parts)
    raise TypeError(f"not an expression node: {e!r}")


def _print_factor(f):
    text = _print(f)
    return f"({text})" if isinstance(f, Sum) else text


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*^()]))"
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        tok = m.group(kind)
        if kind == "name":
            if tok == "t":
                kind = "t"
            elif tok in FUNC_NAMES or tok == "log1p_l":
                kind = "func"
            else:
                raise ExprSyntaxError(f"unknown name {tok!r}", start, "t or a function name")
        elif kind == "op":
            kind = tok
        tokens.append(_Token(kind, tok, start))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


@dataclass
class _Parser:
    tokens: list
    i: int = field(default=0)

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, kind, expected=None):
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ExprSyntaxError(f"unexpected {found}", tok.pos, expected or repr(kind))
        self.i += 1
        return tok

    def expr(self):
        terms = [self.term()]
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind)
            term = self.term()
            terms.append(Scale(-1.0, term) if op.kind == "-" else term)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        negate = False
        if self.tok.kind == "-":
            self.take("-")
            negate = True
        factors = [self.factor()]
        while self.tok.kind == "*":
            self.take("*")
            factors.append(self.factor())
        node = factors[0] if len(factors) == 1 else Prod(tuple(factors))
        return Scale(-1.0, node) if negate else node

    def factor(self):
        kind, payload, pos = self.base()
        if self.tok.kind != "^":
            return self._build(kind, payload, None, pos)
        self.take("^")
        exp_pos = self.tok.pos
        sign = 1.0
        if self.tok.kind == "-":
            self.take("-")
            sign = -1.0
        exponent = sign * float(self.take("num", "a number").text)
        return self._build(kind, payload, exponent, exp_pos)

    def base(self):
        tok = self.tok
        if tok.kind == "num":
            self.take("num")
            return "num", float(tok.text), tok.pos
        if tok.kind == "t":
            self.take("t")
            return "t", None, tok.pos
        if tok.kind == "func":
            self.take("func")
            self.take("(", "'('")
            coef = self.linarg(tok.text)
            self.take(")", "')'")
            return "func", (tok.text, coef, tok.pos), tok.pos
        if tok.kind == "(":
            self.take("(")
            inner = self.expr()
            self.take(")", "')'")
            return "group", inner, tok.pos
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {found}", tok.pos, "a number, t, a function or '('")

    def linarg(self, func):
        start = self.tok.pos
        sign = 1.0
        coef = 1.0
        if self.tok.kind == "-":
            self.take("-")
            sign = -1.0
        if self.tok.kind == "num":
            coef = float(self.take("num").text)
            if self.tok.kind != "*":
                raise NonLinearArgument(f"argument of {func} must have the form a*t", start, "'*t'")
            self.take("*")
        if self.tok.kind != "t":
            raise NonLinearArgument(f"argument of {func} must have the form a*t", start, "a*t")
        self.take("t")
        if self.tok.kind == "end":
            raise ExprSyntaxError("unexpected end of input", self.tok.pos, "')'")
        if self.tok.kind != ")":
            raise NonLinearArgument(f"argument of {func} must have the form a*t", self.tok.pos, "')'")
        return sign * coef

    def _build(self, kind, payload, exponent, pos):
        if kind == "num":
            value = payload if exponent is None else _real_power(payload, exponent, pos)
            return Const(value)
        if kind == "t":
            alpha = 1.0 if exponent is None else exponent
            if not alpha > -1:
                raise ExponentOutOfRange(f"power of t must exceed -1, got {_num(alpha)}", pos, "exponent > -1")
            return Power(alpha)
        if kind == "func":
            name, coef, fpos = payload
            if name == "log1p_l":
                if coef != 1:
                    raise NonLinearArgument("log1p_l takes t with coefficient 1", fpos, "log1p_l(t)")
                n = 1.0 if exponent is None else exponent
                if n < 0 or n != int(n):
                    raise NonIntegerLogPower(
                        f"log1p_l power must be a non-negative integer, got {_num(n)}", pos
                    )
                return LogPow(int(n))
            atom = FUNC_NAMES[name](coef)
            if exponent is None:
                return atom
            if name == "exp_l":
                return DegExp(coef * exponent)
            return _repeat(atom, exponent, pos)
        return payload if exponent is None else _repeat(payload, exponent, pos)


def _real_power(base, exponent, pos):
    try:
        value = base ** exponent
    except (OverflowError, ZeroDivisionError):
        raise ExprSyntaxError("constant power is not a finite real number", pos) from None
    if isinstance(value, complex) or not math.isfinite(value):
        raise ExprSyntaxError("constant power is not a finite real number", pos)
    return value


def _repeat(node, exponent, pos):
    if exponent < 0 or exponent != int(exponent):
        raise ExprSyntaxError("exponent here must be a non-negative integer", pos, "integer exponent")
    k = int(exponent)
    if k == 0:
        return Const(1.0)
    return node if k == 1 else Prod((node,) * k)


def parse(text: str) -> Expr:
    """Parse expression text into a normalized AST."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, "an expression")
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    if parser.tok.kind != "end":
        raise ExprSyntaxError(f"unexpected {parser.tok.text!r}", parser.tok.pos, "an operator or end of input")
    try:
        return normalize(node)
    except DomainError as exc:
        # merging t^a * t^b can leave the admissible range; no single token is at fault
        raise ExponentOutOfRange(str(exc), 0, "combined power of t > -1") from None


# ---------------------------------------------------------------------------
# evaluation


def eval_at(e: Expr, lam, t):
    """Value of ``e`` at ``t`` (scalar or numpy array, t >= 0)."""
    lam = degenfun.lam_value(lam)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise DomainError("t must be non-negative")
    out = _eval(e, lam, arr)
    out = np.broadcast_to(out, arr.shape)
    return float(out) if out.ndim == 0 else np.array(out)


def _eval(e, lam, t):
    if isinstance(e, Const):
        return np.full(t.shape, e.c)
    if isinstance(e, Power):
        if e.alpha < 0 and np.any(t == 0):
            raise DomainError(f"t^{_num(e.alpha)} is singular at t = 0")
        return np.power(t, e.alpha)
    if isinstance(e, DegExp):
        return np.asarray(degenfun.deg_pow(lam, e.a, t))
    if isinstance(e, (CosL, SinL)):
        c, s = degenfun.deg_trig(lam, e.a, t)
        return np.asarray(c if isinstance(e, CosL) else s)
    if isinstance(e, (CoshL, SinhL)):
        c, s = degenfun.deg_hyp(lam, e.a, t)
        return np.asarray(c if isinstance(e, CoshL) else s)
    if isinstance(e, LogPow):
        return np.asarray(degenfun.log1p_pow(lam, e.n, t))
    if isinstance(e, Scale):
        return e.c * _eval(e.child, lam, t)
    if isinstance(e, Sum):
        out = np.zeros(t.shape)
        for child in e.children:
            out = out + _eval(child, lam, t)
        return out
    if isinstance(e, Prod):
        out = np.ones(t.shape)
        for child in e.children:
            out = out * _eval(child, lam, t)
        return out
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# t-derivative


def deriv_t(e: Expr, lam) -> Expr:
    """Symbolic d/dt.

    The factor 1/(1 + lam*t) produced by the chain rule is written as
    ``DegExp(-lam)``, which is why the concrete lam is needed.
    """
    lam = degenfun.lam_value(lam)
    return normalize(_d(normalize(e), lam))


def _d(e, lam):
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Power):
        if not e.alpha - 1 > -1:
            raise NonDifferentiableAtZero(
                f"derivative of t^{_num(e.alpha)} has exponent below -1 (not integrable at 0)"
            )
        if e.alpha == 1:
            return Const(1.0)
        return Scale(e.alpha, Power(e.alpha - 1))
    recip = DegExp(-lam)
    if isinstance(e, DegExp):
        return Scale(e.a, DegExp(e.a - lam))
    if isinstance(e, CosL):
        return Scale(-e.a, Prod((recip, SinL(e.a))))
    if isinstance(e, SinL):
        return Scale(e.a, Prod((recip, CosL(e.a))))
    if isinstance(e, CoshL):
        return Scale(e.a, Prod((recip, SinhL(e.a))))
    if isinstance(e, SinhL):
        return Scale(e.a, Prod((recip, CoshL(e.a))))
    if isinstance(e, LogPow):
        return Scale(e.n * lam, Prod((LogPow(e.n - 1), recip)))
    if isinstance(e, Scale):
        return Scale(e.c, _d(e.child, lam))
    if isinstance(e, Sum):
        return Sum(tuple(_d(c, lam) for c in e.children))
    if isinstance(e, Prod):
        kids = e.children
        return Sum(
            tuple(Prod(kids[:i] + (_d(k, lam),) + kids[i + 1 :]) for i, k in enumerate(kids))
        )
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# expansion into product terms


@dataclass(frozen=True)
class Term:
    """One additive term ``coef * t**power * exp_l(shift*t) * log1p_l(t)**logpow * others``."""

    coef: float
    shift: float = 0.0
    power: float = 0.0
    logpow: int = 0
    others: tuple = ()

    def to_expr(self) -> Expr:
        factors = [Power(self.power), DegExp(self.shift), LogPow(self.logpow), *self.others]
        return normalize(Scale(self.coef, Prod(tuple(factors))))


def expand(e: Expr) -> list[Term]:
    """Distribute products over sums; each product is collected into a Term."""
    out = []
    for coef, factors in _expand(normalize(e)):
        if coef == 0:
            continue
        shift, power, logn = 0.0, 0.0, 0
        others = []
        for f in factors:
            if isinstance(f, DegExp):
                shift += f.a
            elif isinstance(f, Power):
                power += f.alpha
            elif isinstance(f, LogPow):
                logn += f.n
            else:
                others.append(f)
        out.append(Term(coef, shift, power, logn, tuple(sorted(others, key=_factor_key))))
    return out


def _expand(e):
    if isinstance(e, Const):
        return [(e.c, ())]
    if isinstance(e, Scale):
        return [(e.c * c, f) for c, f in _expand(e.child)]
    if isinstance(e, Sum):
        return [item for child in e.children for item in _expand(child)]
    if isinstance(e, Prod):
        result = [(1.0, ())]
        for child in e.children:
            parts = _expand(child)
            result = [(c1 * c2, f1 + f2) for (c1, f1), (c2, f2) in itertools.product(result, parts)]
        return result
    return [(1.0, (e,))]
