"""Numeric degenerate Laplace transform and degenerate gamma function.

With u = ln(1 + lam*t)/lam the transform integral becomes

    int_0^inf exp(-(s - lam)*u) * f((exp(lam*u) - 1)/lam) du,

an ordinary Laplace kernel.  In u every atom is elementary: exp_l(a*t) is
exp(a*u), cos_l(a*t) is cos(a*u), log1p_l(t)^n is (lam*u)^n.  Each product
term is evaluated as (bounded factor) * exp(log-magnitude) so that growing
atoms and the decaying kernel never overflow separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import degenfun
from .errors import DivergenceError, DomainError
from .expr import CoshL, CosL, Expr, Power, SinhL, SinL, expand
from .quadrature import QuadratureResult, integrate

DEFAULT_TOL = 1e-10
DEFAULT_BUDGET = 2_000_000

__all__ = [
    "DEFAULT_TOL",
    "ExponentialOrderBound",
    "QuadratureResult",
    "estimate_order",
    "fd_derivative",
    "num_deg_gamma",
    "num_transform",
]


@dataclass(frozen=True)
class ExponentialOrderBound:
    """|f(t)| <= M * (1 + lam*t)**(C/lam) for all t > T."""

    C: float
    M: float
    T: float

    def __post_init__(self):
        if not self.M > 0 or self.T < 0:
            raise ValueError("need M > 0 and T >= 0")


def _log_t(lam, u):
    if lam == 0:
        return np.log(u)
    # log((exp(lam*u) - 1)/lam) without overflow for large lam*u
    return lam * u - math.log(lam) + np.log(-np.expm1(-lam * u))


def _term_u(term, lam, decay, u):
    """One expanded term of f(t(u)) times exp(-decay*u)."""
    logmag = (term.shift - decay) * u
    fac = np.full(u.shape, term.coef)
    if term.power != 0:
        logmag = logmag + term.power * _log_t(lam, u)
    if term.logpow:
        fac = fac * (lam * u) ** term.logpow
    for atom in term.others:
        a = atom.a
        if isinstance(atom, CosL):
            fac = fac * np.cos(a * u)
        elif isinstance(atom, SinL):
            fac = fac * np.sin(a * u)
        elif isinstance(atom, CoshL):
            logmag = logmag + abs(a) * u
            fac = fac * 0.5 * (1.0 + np.exp(-2 * abs(a) * u))
        elif isinstance(atom, SinhL):
            logmag = logmag + abs(a) * u
            fac = fac * 0.5 * math.copysign(1.0, a) * -np.expm1(-2 * abs(a) * u)
    return fac * np.exp(logmag)


def _u_integrand(terms, lam, decay):
    def g(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for term in terms:
            out = out + _term_u(term, lam, decay, u)
        return out

    return g


def _exact_rate(term, lam):
    growth = sum(abs(o.a) for o in term.others if isinstance(o, (CoshL, SinhL)))
    return term.shift + growth + term.power * lam


def _poly_degree(term, lam):
    deg = term.logpow
    if lam == 0 and term.power > 0:
        deg += term.power
    return deg


def _order_parts(terms, lam, s=None):
    c_exact = max(_exact_rate(t, lam) for t in terms)
    degree = max(_poly_degree(t, lam) for t in terms)
    eps = 0.0
    if degree > 0:
        eps = 0.05 * lam + 0.05
        if s is not None and s - lam - c_exact > 0:
            eps = min(eps, 0.5 * (s - lam - c_exact))
    return c_exact, eps, degree


def _t_to_u(lam, t):
    return t if lam == 0 else float(t * degenfun.log1p_ratio(lam * t))


def estimate_order(f: Expr, lam, s=None) -> ExponentialOrderBound:
    """Degenerate exponential order of ``f``.

    C is the exact growth rate in u plus a margin eps = 0.05*lam + 0.05 when
    polynomial-in-u factors (log powers, or t^n at lam = 0) are present.  When
    ``s`` is given the margin is capped at half the distance to divergence.
    M is the sampled supremum of |f| * (1+lam t)^(-C/lam) on t > T, doubled.
    """
    lam = degenfun.lam_value(lam)
    terms = expand(f)
    if not terms:
        return ExponentialOrderBound(0.0, 1e-300, 0.0)
    c_exact, eps, degree = _order_parts(terms, lam, s)
    C = c_exact + eps
    T = 1.0 if any(t.power < 0 for t in terms) else 0.0
    u_lo = _t_to_u(lam, T)
    u_hi = 1e3
    if lam > 0:
        u_hi = max(u_hi, 50.0 / lam)
    if eps > 0:
        u_hi = max(u_hi, 200.0 * (1 + degree) / eps)
    grid = np.unique(np.concatenate([
        np.linspace(max(u_lo, 1e-6), u_lo + 10.0, 400),
        np.geomspace(u_lo + 10.0, u_lo + u_hi, 600),
    ]))
    sup = 0.0
    for term in terms:
        sup += float(np.max(np.abs(_term_u(term, lam, C, grid))))
    return ExponentialOrderBound(C, max(2.0 * sup, 1e-300), T)


def _oscillation(terms):
    return max(sum(abs(o.a) for o in t.others if isinstance(o, (CosL, SinL))) for t in terms)


def num_transform(f: Expr, lam, s: float, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET):
    """Quadrature value of the degenerate Laplace transform of ``f`` at ``s``."""
    lam = degenfun.lam_value(lam)
    s = float(s)
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError(f"tol must lie in [1e-12, 1e-4], got {tol}")
    terms = expand(f)
    if not terms:
        return QuadratureResult(0.0, 0.0, 1)
    c_exact, _, _ = _order_parts(terms, lam, s)
    if not s - lam - c_exact > 0:
        raise DivergenceError(
            f"integral diverges: need s > {lam + c_exact:.9g}, got s = {s:.9g}"
        )
    order = estimate_order(f, lam, s)
    rate = s - lam - order.C
    u_T = _t_to_u(lam, order.T)
    U = max(u_T, math.log(max(10.0 * order.M / (rate * tol), 1.0)) / rate, 1.0 / rate)
    tail = order.M * math.exp(-rate * U) / rate

    g = _u_integrand(terms, lam, s - lam)
    width = 1.0 / (_oscillation(terms) + (s - lam) + 1.0)

    def panels(length):
        return int(min(max(8, math.ceil(length / width)), budget // 60))

    alpha_min = min(t.power for t in terms)
    pieces = []
    if alpha_min < 0:
        # u = v**p makes u**alpha du bounded near 0
        p = 1.0 / (1.0 + alpha_min)
        u1 = min(1.0, U)

        def g_sub(v):
            return g(v ** p) * p * v ** (p - 1)

        pieces.append(integrate(g_sub, 0.0, u1 ** (1 / p), tol / 2, budget // 2, panels(u1)))
        if U > u1:
            pieces.append(integrate(g, u1, U, tol / 2, budget // 2, panels(U - u1)))
    else:
        pieces.append(integrate(g, 0.0, U, tol, budget, panels(U)))
    value = math.fsum(p.value for p in pieces)
    err = math.fsum(p.abs_error_estimate for p in pieces) + tail
    return QuadratureResult(value, err, sum(p.evaluations for p in pieces))


def num_deg_gamma(lam, s: float, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET):
    """Quadrature of int_0^inf (1 + lam*t)^(-1/lam) t^(s-1) dt.

    This is the transform of t^(s-1) at transform variable 1; it never
    touches the Beta-function path.
    """
    s = float(s)
    lam = degenfun.check_gamma_domain(lam, s)
    return num_transform(Power(s - 1.0), lam, 1.0, tol, budget)


def fd_derivative(F, s: float, n: int, h: float | None = None, sigma_min: float | None = None) -> float:
    """Central difference of order n in {0, 1, 2} with one Richardson step."""
    s = float(s)
    if n == 0:
        return F(s)
    if n not in (1, 2):
        raise ValueError("n must be 0, 1 or 2")
    if h is None:
        h = max(1e-4, 1e-3 * abs(s))
    if sigma_min is not None and not s - h > sigma_min:
        raise DomainError(f"difference stencil s - h = {s - h:.9g} leaves the region s > {sigma_min:.9g}")

    f0 = F(s) if n == 2 else 0.0

    def central(step):
        up, down = F(s + step), F(s - step)
        if n == 1:
            return (up - down) / (2 * step)
        return (up - 2 * f0 + down) / step ** 2

    return (4 * central(h / 2) - central(h)) / 3
