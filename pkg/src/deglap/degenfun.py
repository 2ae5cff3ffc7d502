"""Pointwise degenerate special functions.

Every function takes the degeneracy parameter ``lam`` (a float or a
:class:`Lambda`).  ``lam == 0`` is an exact branch returning the classical
function, not a numerical limit.  The elementary functions accept numpy
arrays for ``t`` as well as scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Lambda:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise DomainError(f"lambda must be finite and >= 0, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def degenerate(self) -> bool:
        return self.value > 0

    def __float__(self):
        return self.value


def lam_value(lam) -> float:
    """Coerce a float or :class:`Lambda` to a validated float."""
    if isinstance(lam, Lambda):
        return lam.value
    return Lambda(lam).value


def _scalar_or_array(x):
    if np.ndim(x) == 0:
        return float(x)
    return x


def _check_base(lam, t):
    base = 1.0 + lam * np.asarray(t, dtype=float)
    if np.any(base <= 0):
        raise DomainError("1 + lambda*t must be positive")


def _finite(x, what):
    if not np.all(np.isfinite(x)):
        raise OverflowError(f"{what} overflowed")
    return _scalar_or_array(x)


def log1p_ratio(x):
    """ln(1+x)/x, accurate also when x is tiny or subnormal."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-5
    safe = np.where(small, 1.0, x)
    series = 1.0 - x / 2 + x * x / 3
    return np.where(small, series, np.log1p(safe) / safe)


def deg_angle(lam, a, t):
    """Return (a/lam)*ln(1+lam*t), or a*t when lam == 0."""
    lam = lam_value(lam)
    t = np.asarray(t, dtype=float)
    if lam == 0:
        return a * t
    _check_base(lam, t)
    # written as a*t*ln(1+x)/x so that a tiny lam does not lose t
    return a * t * log1p_ratio(lam * t)


def deg_pow(lam, a, t):
    """(1 + lam*t)**(a/lam); exp(a*t) on the classical branch."""
    with np.errstate(over="ignore"):
        out = np.exp(deg_angle(lam, a, t))
    return _finite(out, "deg_pow")


def deg_trig(lam, a, t):
    """Degenerate cosine and sine of ``a*t``.

    cos_l(at) + i sin_l(at) = (1 + lam*t)**(i*a/lam), so both are ordinary
    cos/sin of the angle (a/lam)*ln(1 + lam*t).
    """
    theta = deg_angle(lam, a, t)
    return _scalar_or_array(np.cos(theta)), _scalar_or_array(np.sin(theta))


def deg_hyp(lam, a, t):
    """Degenerate hyperbolic cosine and sine of ``a*t``."""
    theta = deg_angle(lam, a, t)
    with np.errstate(over="ignore"):
        up = np.exp(theta)
        down = np.exp(-theta)
        c = 0.5 * (up + down)
        s = 0.5 * (up - down)
    return _finite(c, "cosh_l"), _finite(s, "sinh_l")


def log1p_pow(lam, n, t):
    """(ln(1 + lam*t))**n.

    At lam == 0 the literal limit is used: 1 for n == 0, else 0.
    """
    lam = lam_value(lam)
    n = int(n)
    if n < 0:
        raise DomainError("log power must be a non-negative integer")
    t = np.asarray(t, dtype=float)
    if n == 0:
        return _scalar_or_array(np.ones_like(t))
    if lam == 0:
        return _scalar_or_array(np.zeros_like(t))
    _check_base(lam, t)
    return _scalar_or_array(np.log1p(lam * t) ** n)


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def check_gamma_domain(lam, s):
    """Raise DomainError unless 0 < s < 1/lam (s > 0 when lam == 0)."""
    lam = lam_value(lam)
    if not s > 0:
        raise DomainError(f"degenerate gamma needs s > 0, got s={s:.9g}")
    if lam > 0 and not s * lam < 1:
        raise DomainError(f"degenerate gamma needs s < 1/lambda = {1 / lam:.9g}, got s={s:.9g}")
    return lam


def deg_gamma(lam, s):
    """Degenerate gamma function through the Beta identity.

    Gamma_lam(s) = lam**(-s) * B(s, 1/lam - s); the three log-gamma terms are
    summed before exponentiating so that 1/lam may be large.
    """
    s = float(s)
    lam = check_gamma_domain(lam, s)
    if lam == 0:
        return math.gamma(s)
    inv = 1.0 / lam
    log_val = -s * math.log(lam) + log_gamma(s) + log_gamma(inv - s) - log_gamma(inv)
    return math.exp(log_val)


def deg_gamma_int(lam, k):
    """Gamma_lam(k) = (k-1)! / ((1-lam)(1-2 lam)...(1-k lam)) for integer k >= 1."""
    lam = lam_value(lam)
    k = int(k)
    if k < 1:
        raise DomainError("k must be a positive integer")
    if lam > 0 and not k * lam < 1:
        raise DomainError(f"need k*lambda < 1, got k={k}, lambda={lam}")
    den = 1.0
    for j in range(1, k + 1):
        den *= 1.0 - j * lam
    return math.factorial(k - 1) / den
