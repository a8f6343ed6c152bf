"""Binomial tail D(n; w, p) for real ticket counts.

D(n; w, p) is the probability of at least ``w`` wins with ``n`` tickets that
each win with probability ``p``.  For real ``n`` it is defined through the
regularized incomplete Beta function, D(n; w, p) = I_p(w, n - w + 1), which
agrees with the binomial sum at integer ``n``.

Everything the optimizer touches is computed in log space; tails below
1e-300 are routine there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ParameterError",
    "DomainError",
    "TailQuery",
    "log_beta",
    "reg_beta",
    "log_reg_beta",
    "tail_prob",
    "log_tail_prob",
    "dlog_tail_dn",
    "min_tickets",
    "min_tickets_continuous",
]

_CF_TINY = 1e-30
_CF_MAX_ITER = 500
_CF_EPS = 1e-16
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class ParameterError(ValueError):
    """An argument is outside the domain of the function."""


class DomainError(ValueError):
    """A tail query asks for D(n; w, p) with n < w, or a derivative at n <= w."""


@dataclass(frozen=True)
class TailQuery:
    """Ticket count ``n`` (real), win count ``w`` and per-ticket probability ``p``."""

    n: float
    w: int
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ParameterError(f"p must lie strictly inside (0, 1), got {self.p!r}")
        if self.w < 0 or int(self.w) != self.w:
            raise ParameterError(f"w must be a non-negative integer, got {self.w!r}")
        if not self.n >= 0.0 or math.isinf(self.n):
            raise ParameterError(f"n must be finite and non-negative, got {self.n!r}")
        if self.w >= 1 and self.n < self.w:
            raise DomainError(f"D(n; w, p) needs n >= w, got n={self.n!r}, w={self.w!r}")


def _stirling_tail(z):
    # lgamma(z) - [(z - 0.5) log z - z + 0.5 log(2 pi)], accurate to ~1e-19 for z >= 30
    z2 = 1.0 / (z * z)
    return (1.0 / z) * (
        1.0 / 12.0
        - z2 * (1.0 / 360.0 - z2 * (1.0 / 1260.0 - z2 * (1.0 / 1680.0 - z2 / 1188.0)))
    )


def _lgamma_shift(a, b):
    """lgamma(b) - lgamma(a + b), without cancellation when b >> a."""
    if b < 30.0:
        return math.lgamma(b) - math.lgamma(a + b)
    s = a + b
    return (
        -(b - 0.5) * math.log1p(a / b)
        - a * math.log(s)
        + a
        + _stirling_tail(b)
        - _stirling_tail(s)
    )


def log_beta(a, b):
    """log B(a, b) for a, b > 0."""
    if a > b:
        a, b = b, a
    return math.lgamma(a) + _lgamma_shift(a, b)


def _betacf(x, a, b):
    """Continued fraction for I_x(a, b) (modified Lentz).

    Converges fastest for x < (a + 1) / (a + b + 2).
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete Beta continued fraction did not converge in {_CF_MAX_ITER} "
        f"iterations (x={x!r}, a={a!r}, b={b!r})"
    )


def _log1pmx_series(u):
    # log(1 + u) - u = -u^2/2 + u^3/3 - ..., for |u| <= 0.1
    term = -u
    total = 0.0
    k = 2
    while True:
        term *= -u
        inc = term / k
        total -= inc
        if abs(inc) <= 1e-18 * abs(total):
            return total
        k += 1


def _log_prefactor(x, a, b):
    """log[x^a (1-x)^b / B(a, b)]."""
    if min(a, b) < 8.0:
        return a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    # expand around the mean x0 = a/(a+b) so the large log terms cancel analytically
    s = a + b
    delta = x - a / s
    u = delta * s / a
    v = -delta * s / b
    if abs(u) <= 0.1:
        dev_a = _log1pmx_series(u)
    else:
        dev_a = math.log(x) + math.log1p(b / a) - u
    if abs(v) <= 0.1:
        dev_b = _log1pmx_series(v)
    else:
        dev_b = math.log1p(-x) + math.log1p(a / b) - v
    stirling = _stirling_tail(a) + _stirling_tail(b) - _stirling_tail(s)
    return a * dev_a + b * dev_b + 0.5 * math.log(a * b / s) - _HALF_LOG_2PI - stirling


def _check_beta_args(x, a, b):
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"x must lie in [0, 1], got {x!r}")
    if not a > 0.0:
        raise ParameterError(f"a must be positive, got {a!r}")
    if not b > 0.0:
        raise ParameterError(f"b must be positive, got {b!r}")


def _split(x, a, b):
    """Return (log_t, complement) with I = t or I = 1 - t respectively."""
    log_pre = _log_prefactor(x, a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return log_pre + math.log(_betacf(x, a, b)) - math.log(a), False
    return log_pre + math.log(_betacf(1.0 - x, b, a)) - math.log(b), True


def reg_beta(x, a, b):
    """Regularized incomplete Beta function I_x(a, b)."""
    _check_beta_args(x, a, b)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_t, complement = _split(x, a, b)
    t = math.exp(log_t)
    return 1.0 - t if complement else t


def log_reg_beta(x, a, b):
    """log I_x(a, b); finite for any 0 < x <= 1 however small the result."""
    _check_beta_args(x, a, b)
    if x == 0.0:
        return -math.inf
    if x == 1.0:
        return 0.0
    log_t, complement = _split(x, a, b)
    if complement:
        return math.log1p(-math.exp(log_t))
    return log_t


def _as_query(q):
    return q if isinstance(q, TailQuery) else TailQuery(*q)


def tail_prob(q):
    """D(n; w, p) = I_p(w, n - w + 1); ``q`` is a TailQuery or an (n, w, p) tuple."""
    q = _as_query(q)
    if q.w == 0:
        return 1.0
    if q.n == q.w:
        return q.p ** q.w
    return reg_beta(q.p, q.w, q.n - q.w + 1.0)


def log_tail_prob(q):
    """log D(n; w, p)."""
    q = _as_query(q)
    if q.w == 0:
        return 0.0
    if q.n == q.w:
        return q.w * math.log(q.p)
    return log_reg_beta(q.p, q.w, q.n - q.w + 1.0)


def _log_tail(n, w, p):
    # unchecked fast path for inner loops; caller guarantees n >= w >= 1
    if n == w:
        return w * math.log(p)
    return log_reg_beta(p, w, n - w + 1.0)


def dlog_tail_dn(q):
    """Partial derivative of log D(n; w, p) in n.

    Central differences with step ``max(1e-4 n, 1e-3)`` (shrunk to stay inside
    n - h >= w), Richardson-extrapolated once.  Positive and decreasing in n.
    """
    q = _as_query(q)
    if q.w == 0:
        return 0.0
    if q.n <= q.w:
        raise DomainError(f"derivative needs n > w, got n={q.n!r}, w={q.w!r}")
    return _dlog_tail(q.n, q.w, q.p)


def _dlog_tail(n, w, p):
    h = max(1e-4 * n, 1e-3)
    h = min(h, 0.5 * (n - w))
    f = _log_tail
    d_h = (f(n + h, w, p) - f(n - h, w, p)) / (2.0 * h)
    h2 = 0.5 * h
    d_h2 = (f(n + h2, w, p) - f(n - h2, w, p)) / (2.0 * h2)
    return (4.0 * d_h2 - d_h) / 3.0


def _check_min_tickets_args(w, p, eps):
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    if w < 1 or int(w) != w:
        raise ParameterError(f"w must be a positive integer, got {w!r}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie strictly inside (0, 1), got {p!r}")


def min_tickets_continuous(w, p, eps, tol=0.5):
    """Bisection root of D(n; w, p) = eps on n >= w, before integer rounding.

    Returns the upper end of the final bracket, so D(result) >= eps always.
    """
    _check_min_tickets_args(w, p, eps)
    log_eps = math.log(eps)
    if w * math.log(p) >= log_eps:
        return float(w)
    lo = float(w)
    hi = max(2.0 * w, w / p)
    while _log_tail(hi, w, p) < log_eps:
        lo, hi = hi, 2.0 * hi
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if _log_tail(mid, w, p) >= log_eps:
            hi = mid
        else:
            lo = mid
    return hi


def min_tickets(w, p, eps):
    """Smallest whole number of tickets n >= w with D(n; w, p) >= eps.

    >>> min_tickets(1, 0.1, 0.05)
    1.0
    """
    n = float(math.ceil(min_tickets_continuous(w, p, eps)))
    log_eps = math.log(eps)
    while n - 1.0 >= w and _log_tail(n - 1.0, w, p) >= log_eps:
        n -= 1.0
    return n
