"""Rule-based degenerate Laplace transforms in closed form.

Closed forms are small expression trees in the transform variable s
(:class:`SExpr`).  The rule table maps each base atom to its transform;
a net ``exp_l(a*t)`` factor shifts s to s - a, and a ``log1p_l(t)^n``
factor becomes (-1)**n * lam**n * (d/ds)**n of the base transform.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

from . import degenfun
from .errors import DivergenceError, DomainError, NonDifferentiableAtZero, UnsupportedShape
from .expr import CoshL, CosL, Expr, SinhL, SinL, Term, deriv_t, eval_at, expand, to_text

log = logging.getLogger(__name__)


class SExpr:
    def __str__(self):
        return sexpr_text(self)


@dataclass(frozen=True)
class SConst(SExpr):
    c: float


@dataclass(frozen=True)
class LinFactor(SExpr):
    """The linear factor s - c."""

    c: float


@dataclass(frozen=True)
class SSum(SExpr):
    terms: tuple


@dataclass(frozen=True)
class SProd(SExpr):
    factors: tuple


@dataclass(frozen=True)
class SPow(SExpr):
    base: SExpr
    p: float


@dataclass(frozen=True)
class DegGammaNode(SExpr):
    """Gamma_{lam/(s - offset)}(beta); lam is supplied at evaluation time."""

    beta: float
    offset: float = 0.0


S = LinFactor(0.0)
ZERO = SConst(0.0)
ONE = SConst(1.0)


# ---------------------------------------------------------------------------
# simplification


@functools.lru_cache(maxsize=None)
def _key(F):
    if isinstance(F, SConst):
        return (0, F.c, "")
    if isinstance(F, LinFactor):
        return (1, F.c, "")
    if isinstance(F, DegGammaNode):
        return (2, F.beta, repr(F))
    if isinstance(F, SPow):
        return (3,) + _key(F.base)[1:] + (F.p,)
    return (4, 0.0, repr(F))


def _as_base_exp(F):
    if isinstance(F, SPow):
        return F.base, F.p
    return F, 1.0


def _split_coef(F):
    if isinstance(F, SConst):
        return F.c, None
    if isinstance(F, SProd) and isinstance(F.factors[0], SConst):
        rest = F.factors[1:]
        return F.factors[0].c, rest[0] if len(rest) == 1 else SProd(rest)
    return 1.0, F


def _with_coef(c, core):
    if core is None:
        return SConst(c)
    if c == 0:
        return ZERO
    if c == 1:
        return core
    if isinstance(core, SProd):
        return SProd((SConst(c),) + core.factors)
    return SProd((SConst(c), core))


@functools.lru_cache(maxsize=65536)
def simplify(F: SExpr) -> SExpr:
    """Flatten, fold constants, merge powers of equal bases, collect like terms."""
    if isinstance(F, (SConst, LinFactor, DegGammaNode)):
        return F
    if isinstance(F, SPow):
        return _simplify_pow(simplify(F.base), F.p)
    if isinstance(F, SProd):
        return _simplify_prod(F)
    if isinstance(F, SSum):
        return _simplify_sum(F)
    raise TypeError(f"not an s-expression: {F!r}")


def _simplify_pow(b, p):
    if p == 0:
        return ONE
    if p == 1:
        return b
    if isinstance(b, SConst):
        if b.c == 0 and p < 0:
            return SPow(b, p)
        if b.c >= 0 or p == int(p):
            return SConst(b.c ** p)
    if p == int(p):
        if isinstance(b, SPow):
            return _simplify_pow(b.base, b.p * p)
        if isinstance(b, SProd):
            return simplify(SProd(tuple(SPow(f, p) for f in b.factors)))
    return SPow(b, p)


def _simplify_prod(F):
    coef = 1.0
    exps = {}
    for f in F.factors:
        f = simplify(f)
        items = f.factors if isinstance(f, SProd) else (f,)
        for g in items:
            if isinstance(g, SConst):
                coef *= g.c
                continue
            base, p = _as_base_exp(g)
            exps[base] = exps.get(base, 0.0) + p
    if coef == 0:
        return ZERO
    factors = []
    for base in sorted(exps, key=_key):
        g = _simplify_pow(base, exps[base])
        if isinstance(g, SConst):
            coef *= g.c
        elif g != ONE:
            factors.append(g)
    if not factors:
        return SConst(coef)
    if coef == 1 and len(factors) == 1:
        return factors[0]
    if len(factors) == 1 and isinstance(factors[0], SSum):
        return _simplify_sum(SSum(tuple(SProd((SConst(coef), t)) for t in factors[0].terms)))
    return _with_coef(coef, SProd(tuple(factors)) if len(factors) > 1 else factors[0])


def _simplify_sum(F):
    coefs = {}
    for t in F.terms:
        t = simplify(t)
        items = t.terms if isinstance(t, SSum) else (t,)
        for u in items:
            c, core = _split_coef(u)
            coefs[core] = coefs.get(core, 0.0) + c
    terms = [_with_coef(c, core) for core, c in coefs.items() if c != 0]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return SSum(tuple(terms))


# ---------------------------------------------------------------------------
# evaluation, differentiation, shift


def sexpr_eval(F: SExpr, lam, s: float) -> float:
    """Numeric value of a closed form at real s."""
    return _ev(F, degenfun.lam_value(lam), float(s))


def _ev(F, lam, s):
    if isinstance(F, SConst):
        return F.c
    if isinstance(F, LinFactor):
        return s - F.c
    if isinstance(F, SSum):
        return math.fsum(_ev(t, lam, s) for t in F.terms)
    if isinstance(F, SProd):
        out = 1.0
        for f in F.factors:
            out *= _ev(f, lam, s)
        return out
    if isinstance(F, SPow):
        b = _ev(F.base, lam, s)
        if b == 0 and F.p < 0:
            raise DomainError(f"pole of the closed form at s = {s:.9g}")
        if b < 0 and F.p != int(F.p):
            raise DomainError(f"non-integer power of a negative value at s = {s:.9g}")
        return b ** F.p
    if isinstance(F, DegGammaNode):
        shifted = s - F.offset
        if not shifted > 0:
            raise DomainError(f"Gamma_(lambda/s) needs s > {F.offset:.9g}")
        return degenfun.deg_gamma(lam / shifted, F.beta)
    raise TypeError(f"not an s-expression: {F!r}")


def _contains_gamma(F):
    if isinstance(F, DegGammaNode):
        return True
    if isinstance(F, SSum):
        return any(_contains_gamma(t) for t in F.terms)
    if isinstance(F, SProd):
        return any(_contains_gamma(f) for f in F.factors)
    if isinstance(F, SPow):
        return _contains_gamma(F.base)
    return False


def _ds(F):
    if isinstance(F, SConst):
        return ZERO
    if isinstance(F, LinFactor):
        return ONE
    if isinstance(F, SSum):
        return SSum(tuple(_ds(t) for t in F.terms))
    if isinstance(F, SProd):
        fs = F.factors
        return SSum(tuple(SProd(fs[:i] + (_ds(f),) + fs[i + 1 :]) for i, f in enumerate(fs)))
    if isinstance(F, SPow):
        return SProd((SConst(F.p), SPow(F.base, F.p - 1), _ds(F.base)))
    if isinstance(F, DegGammaNode):
        raise UnsupportedShape("no s-derivative rule for the degenerate gamma node; use the numeric path")
    raise TypeError(f"not an s-expression: {F!r}")


def sexpr_diff(F: SExpr, n: int = 1) -> SExpr:
    """Exact n-th derivative in s."""
    if _contains_gamma(F):
        raise UnsupportedShape("no s-derivative rule for the degenerate gamma node; use the numeric path")
    for _ in range(n):
        F = simplify(_ds(F))
    return F


def _subst(F, a):
    if isinstance(F, LinFactor):
        return LinFactor(F.c + a)
    if isinstance(F, DegGammaNode):
        return DegGammaNode(F.beta, F.offset + a)
    if isinstance(F, SSum):
        return SSum(tuple(_subst(t, a) for t in F.terms))
    if isinstance(F, SProd):
        return SProd(tuple(_subst(f, a) for f in F.factors))
    if isinstance(F, SPow):
        return SPow(_subst(F.base, a), F.p)
    return F


def shift(F: SExpr, sigma: float, a: float):
    """Replace s by s - a; the threshold moves to sigma + a."""
    if a == 0:
        return F, sigma
    return simplify(_subst(F, a)), sigma + a


# ---------------------------------------------------------------------------
# printing


def _g(x):
    return format(float(x) + 0.0, ".9g")


def sexpr_text(F: SExpr, lam=None) -> str:
    """Compact text of a closed form; lam fills in degenerate gamma subscripts."""
    return _txt(simplify(F), lam)


def _lin_text(c):
    if c == 0:
        return "s"
    return f"s-{_g(c)}" if c > 0 else f"s+{_g(-c)}"


def _txt(F, lam):
    if isinstance(F, SConst):
        return _g(F.c)
    if isinstance(F, LinFactor):
        return _lin_text(F.c)
    if isinstance(F, DegGammaNode):
        if lam == 0:
            return f"Gamma({_g(F.beta)})"
        sub = "lambda" if lam is None else _g(lam)
        arg = "s" if F.offset == 0 else f"({_lin_text(F.offset)})"
        return f"Gamma_{{{sub}/{arg}}}({_g(F.beta)})"
    if isinstance(F, SSum):
        out = ""
        for i, t in enumerate(F.terms):
            c, core = _split_coef(t)
            if c < 0:
                out += "-" + _txt(_with_coef(-c, core), lam)
            else:
                out += ("+" if i else "") + _txt(t, lam)
        return out
    if isinstance(F, SProd):
        return _prod_text(F.factors, lam)
    if isinstance(F, SPow):
        return _prod_text((F,), lam)
    raise TypeError(f"not an s-expression: {F!r}")


def _factor_text(base, p, lam):
    text = _txt(base, lam)
    if isinstance(base, (SSum, SProd)) or (isinstance(base, LinFactor) and base.c != 0):
        text = f"({text})"
    return text if p == 1 else f"{text}^{_g(p)}"


def _prod_text(factors, lam):
    coef = 1.0
    num, den = [], []
    for f in factors:
        if isinstance(f, SConst):
            coef *= f.c
            continue
        base, p = _as_base_exp(f)
        if p < 0:
            den.append(_factor_text(base, -p, lam))
        else:
            num.append(_factor_text(base, p, lam))
    top = "*".join(num)
    if coef == -1 and top:
        top = "-" + top
    elif coef != 1 or not top:
        top = _g(coef) + ("*" + top if top else "")
    if not den:
        return top
    bottom = den[0] if len(den) == 1 else "*".join(den)
    if len(den) > 1:
        bottom = f"({bottom})"
    return f"{top}/{bottom}"


# ---------------------------------------------------------------------------
# rule table


def _rule_unit(lam):
    return SPow(LinFactor(lam), -1.0), lam, "unit"


def _rule_power_int(n, lam):
    factors = [SConst(float(math.factorial(n)))]
    factors += [SPow(LinFactor(j * lam), -1.0) for j in range(1, n + 2)]
    return SProd(tuple(factors)), (n + 1) * lam, f"power_n(n={n})"


def _rule_power_real(alpha, lam):
    F = SProd((SPow(S, -(alpha + 1)), DegGammaNode(alpha + 1)))
    return F, (alpha + 1) * lam, f"power_alpha(alpha={_g(alpha)})"


def _quadratic(lam, a2):
    return SSum((SPow(LinFactor(lam), 2.0), SConst(a2)))


def _rule_cos(a, lam):
    F = SProd((LinFactor(lam), SPow(_quadratic(lam, a * a), -1.0)))
    return F, lam, f"cos_l(a={_g(a)})"


def _rule_sin(a, lam):
    F = SProd((SConst(a), SPow(_quadratic(lam, a * a), -1.0)))
    return F, lam, f"sin_l(a={_g(a)})"


def _rule_cosh(a, lam):
    F = SProd((LinFactor(lam), SPow(_quadratic(lam, -a * a), -1.0)))
    return F, lam + abs(a), f"cosh_l(a={_g(a)})"


def _rule_sinh(a, lam):
    F = SProd((SConst(a), SPow(_quadratic(lam, -a * a), -1.0)))
    return F, lam + abs(a), f"sinh_l(a={_g(a)})"


RULES = {
    "unit": _rule_unit,
    "power_n": _rule_power_int,
    "power_alpha": _rule_power_real,
    "cos_l": _rule_cos,
    "sin_l": _rule_sin,
    "cosh_l": _rule_cosh,
    "sinh_l": _rule_sinh,
}
_ATOM_RULE = {CosL: "cos_l", SinL: "sin_l", CoshL: "cosh_l", SinhL: "sinh_l"}


# ---------------------------------------------------------------------------
# transforms


@dataclass(frozen=True)
class TransformResult:
    closed_form: SExpr
    sigma_min: float
    trace: tuple
    lam: float

    @property
    def text(self) -> str:
        return sexpr_text(self.closed_form, self.lam)

    def evaluate(self, s: float) -> float:
        if not s > self.sigma_min:
            raise DivergenceError(f"transform needs s > {self.sigma_min:.9g}, got s={s:.9g}")
        return sexpr_eval(self.closed_form, self.lam, s)


def _term_transform(term: Term, lam: float):
    if len(term.others) > 1 or (term.others and term.power != 0):
        raise UnsupportedShape(
            f"no closed-form rule for the product {to_text(term.to_expr())!r}; use the numeric path"
        )
    if term.others:
        atom = term.others[0]
        F, sigma, rule = RULES[_ATOM_RULE[type(atom)]](atom.a, lam)
    elif term.power == 0:
        F, sigma, rule = RULES["unit"](lam)
    elif term.power == int(term.power):
        F, sigma, rule = RULES["power_n"](int(term.power), lam)
    else:
        F, sigma, rule = RULES["power_alpha"](term.power, lam)
    trace = [rule]
    if term.shift != 0:
        F, sigma = shift(F, sigma, term.shift)
        trace.append(f"shift(a={_g(term.shift)})")
    if term.logpow:
        n = term.logpow
        if lam == 0:
            F = ZERO
        else:
            if _contains_gamma(F):
                raise UnsupportedShape(
                    f"log power over {to_text(term.to_expr())!r} needs d/ds of a degenerate gamma node; "
                    "use the numeric path"
                )
            F = SProd((SConst((-1) ** n * lam ** n), sexpr_diff(F, n)))
        trace.append(f"log_power(n={n})")
    return simplify(F), sigma, trace


def transform(f: Expr, lam) -> TransformResult:
    """Closed-form degenerate Laplace transform of ``f``."""
    lam = degenfun.lam_value(lam)
    terms = expand(f)
    trace = ["normalize"]
    if not terms:
        return TransformResult(ZERO, lam, tuple(trace + ["zero"]), lam)
    if len(terms) > 1 or terms[0].coef != 1:
        trace.append("linearity")
    parts = []
    sigma = -math.inf
    for term in terms:
        F, sig, rules = _term_transform(term, lam)
        parts.append(SProd((SConst(term.coef), F)))
        sigma = max(sigma, sig)
        trace.extend(rules)
    return TransformResult(simplify(SSum(tuple(parts))), sigma, tuple(trace), lam)


def convergence_threshold(f: Expr, lam) -> float:
    """Infimum of s for which the transform integral of ``f`` converges.

    Per term: net exp_l shift + sum of |a| over hyperbolic atoms +
    (power + 1)*lam; the largest over all terms.
    """
    lam = degenfun.lam_value(lam)
    terms = expand(f)
    if not terms:
        return lam
    return max(_term_threshold(t, lam) for t in terms)


def _term_threshold(term, lam):
    growth = sum(abs(o.a) for o in term.others if isinstance(o, (CoshL, SinhL)))
    return term.shift + growth + (term.power + 1) * lam


def _value_at_zero(g, lam):
    try:
        return eval_at(g, lam, 0.0)
    except DomainError as exc:
        raise NonDifferentiableAtZero(f"{to_text(g)!r} is singular at t = 0") from exc


def transform_derivative(f: Expr, n: int, lam) -> TransformResult:
    """Transform of the n-th t-derivative of ``f`` via the derivative rule.

    s(s+lam)...(s+(n-1)lam) * L[(1+lam t)^(-n) f] minus the initial-value
    sum; (1+lam t)^(-n) f is the shift of L[f] by -n*lam.
    """
    lam = degenfun.lam_value(lam)
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    base = transform(f, lam)
    G, sigma_g = shift(base.closed_form, base.sigma_min, -n * lam)
    rising = SProd(tuple(LinFactor(-l * lam) for l in range(n)))
    derivs = [f]
    for _ in range(1, n):
        derivs.append(deriv_t(derivs[-1], lam))
    parts = [SProd((rising, G))]
    for i in range(n):
        value = _value_at_zero(derivs[i], lam)
        steps = tuple(LinFactor(-(l - 1) * lam) for l in range(1, n - i))
        parts.append(SProd((SConst(-value),) + steps))
    closed = simplify(SSum(tuple(parts)))
    f_n = deriv_t(derivs[-1], lam)
    sigma = max(sigma_g, convergence_threshold(f_n, lam))
    trace = list(base.trace) + [f"shift(a={_g(-n * lam)})", f"derivative_rule(n={n})"]
    trace.append(_cross_check(closed, f_n, lam, sigma))
    return TransformResult(closed, sigma, tuple(trace), lam)


def _cross_check(closed, f_n, lam, sigma):
    try:
        direct = transform(f_n, lam)
    except UnsupportedShape:
        return "crosscheck(skipped)"
    worst = 0.0
    for delta in (0.5, 2.0):
        s = max(sigma, direct.sigma_min) + delta
        a = sexpr_eval(closed, lam, s)
        b = direct.evaluate(s)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300) if b else abs(a))
    if worst > 1e-9:
        log.warning("derivative rule disagrees with direct transform (rel %.3g)", worst)
        return f"crosscheck(mismatch={_g(worst)})"
    return "crosscheck(agree)"
