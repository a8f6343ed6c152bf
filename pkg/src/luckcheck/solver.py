"""Minimum plausible spend and maximum win probability over relaxed ticket counts.

Both programs are convex once ``n`` is allowed to be real: log D(n; w, p) is
concave in ``n``, so the feasible set {sum_i log D(n_i) >= log eps, n_i >= w_i}
is convex and any KKT point is a global optimum.

They share one dual construction.  For a multiplier ``lam > 0`` every bet
independently picks the ticket count where the marginal log-probability per
dollar equals ``1 / lam``::

    d/dn log D(n_i; w_i, p_i) = c_i / lam      (or n_i = w_i if that is impossible)

``n_i(lam)`` is nondecreasing in ``lam``.  The min-spend problem searches
``lam`` until the probability constraint binds; the max-probability problem
searches it until the budget binds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .betamath import ParameterError, _log_tail

__all__ = [
    "Bet",
    "MinSpendProblem",
    "MaxProbProblem",
    "SpendBound",
    "MaxProbResult",
    "ConvergenceError",
    "InfeasibleBudgetError",
    "solve_min_spend",
    "solve_max_prob",
    "solve_min_spend_subset",
]

LOG_LAM_MIN = math.log(1e-30)
LOG_LAM_MAX = math.log(1e30)
MAX_OUTER = 200
MAX_INNER = 200
REL_TOL = 1e-8

# offset above n = w where the vertex slope is sampled; log D is smooth there
_VERTEX_OFFSET = 1e-6
# the outer search stops once the residual is this fraction of the tolerance
_EARLY_STOP = 1e-2


class ConvergenceError(RuntimeError):
    """Root search did not meet tolerance; ``last_iterate`` holds the final n."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InfeasibleBudgetError(ValueError):
    """The budget cannot even buy the observed wins."""

    def __init__(self, budget, required):
        self.budget = budget
        self.required = required
        self.deficit = required - budget
        super().__init__(
            f"budget {budget:,.2f} is below the {required:,.2f} needed to place "
            f"the winning bets at all (deficit {self.deficit:,.2f})"
        )


@dataclass(frozen=True)
class Bet:
    """One bet type: ticket cost, per-ticket win probability, observed wins."""

    cost: float
    win_prob: float
    wins: int

    def __post_init__(self):
        if not self.cost > 0:
            raise ParameterError(f"cost must be positive, got {self.cost!r}")
        if not 0.0 < self.win_prob < 1.0:
            raise ParameterError(f"win_prob must lie in (0, 1), got {self.win_prob!r}")
        if self.wins < 0 or int(self.wins) != self.wins:
            raise ParameterError(f"wins must be a non-negative integer, got {self.wins!r}")


def _as_bets(bets):
    return tuple(b if isinstance(b, Bet) else Bet(*b) for b in bets)


@dataclass(frozen=True)
class MinSpendProblem:
    bets: tuple
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "bets", _as_bets(self.bets))
        if not self.bets:
            raise ParameterError("at least one bet is required")
        if not 0.0 < self.eps < 1.0:
            raise ParameterError(f"eps must lie in (0, 1), got {self.eps!r}")


@dataclass(frozen=True)
class MaxProbProblem:
    bets: tuple
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "bets", _as_bets(self.bets))
        if not self.bets:
            raise ParameterError("at least one bet is required")
        required = sum(b.cost * b.wins for b in self.bets)
        if self.budget < required * (1.0 - 1e-12):
            raise InfeasibleBudgetError(self.budget, required)


@dataclass
class SpendBound:
    """Continuous optimum of the min-spend program.

    ``n_star`` is real-valued; ``n_rounded``/``spend_rounded`` give the
    whole-ticket round-up, which is feasible but no longer a lower bound.
    """

    n_star: np.ndarray
    spend: float
    achieved_log_prob: float
    active_set: tuple
    converged: bool
    iterations: int
    relaxed: bool = False
    keep: tuple | None = None
    costs: np.ndarray = field(default=None, repr=False)

    @property
    def achieved_prob(self):
        return math.exp(self.achieved_log_prob)

    @property
    def n_rounded(self):
        return np.ceil(self.n_star - 1e-9) + 0.0  # no negative zeros

    @property
    def spend_rounded(self):
        return float(np.dot(self.costs, self.n_rounded))


@dataclass
class MaxProbResult:
    n_star: np.ndarray
    log_prob: float
    spend: float
    active_set: tuple
    iterations: int

    @property
    def prob(self):
        return math.exp(self.log_prob)

    def __iter__(self):
        # unpacks as (n_star, log_prob)
        return iter((self.n_star, self.log_prob))


class _Coordinate:
    """Dual response of one bet with w >= 1."""

    __slots__ = ("cost", "wins", "p", "vertex_slope", "lo", "hi")

    def __init__(self, bet):
        self.cost = bet.cost
        self.wins = bet.wins
        self.p = bet.win_prob
        w = bet.wins
        self.vertex_slope = self.slope(w + _VERTEX_OFFSET * max(1.0, w))
        # known bracket on the response, tightened as the outer search proceeds
        self.lo = float(w)
        self.hi = math.inf

    def slope(self, n):
        # plain central difference: the outer check re-evaluates log D exactly,
        # so the response only needs to be smooth and monotone in lam
        w = self.wins
        h = min(max(1e-4 * n, 1e-3), 0.5 * (n - w))
        return (_log_tail(n + h, w, self.p) - _log_tail(n - h, w, self.p)) / (2.0 * h)

    def response(self, lam):
        target = self.cost / lam
        w = self.wins
        if target >= self.vertex_slope:
            return float(w)
        lo = max(self.lo, w + _VERTEX_OFFSET * max(1.0, w))
        if self.slope(lo) <= target:
            lo = w + _VERTEX_OFFSET * max(1.0, w)
            if self.slope(lo) <= target:
                return lo
        hi = self.hi
        if not math.isfinite(hi) or self.slope(hi) > target:
            hi = max(lo, w / self.p, w + 1.0)
            while self.slope(hi) > target:
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    raise ConvergenceError(f"no finite response for cost/lam={target!r}")
        return brentq(
            lambda n: self.slope(n) - target,
            lo,
            hi,
            xtol=1e-11 * hi,
            rtol=1e-12,
            maxiter=MAX_INNER,
            disp=False,
        )

    def log_prob(self, n):
        return _log_tail(n, self.wins, self.p)


class _Dual:
    """n(lam) over all bets; bets with zero wins stay at n = 0."""

    def __init__(self, bets):
        self.bets = bets
        self.costs = np.array([b.cost for b in bets], dtype=float)
        self.coords = {i: _Coordinate(b) for i, b in enumerate(bets) if b.wins > 0}
        self.calls = 0

    def ticket_counts(self, log_lam):
        self.calls += 1
        lam = math.exp(log_lam)
        n = np.zeros(len(self.bets))
        for i, coord in self.coords.items():
            n[i] = coord.response(lam)
        return n

    def narrow(self, n_lo, n_hi):
        # responses are monotone in lam, so outer-bracket endpoints bound every later call
        for i, coord in self.coords.items():
            coord.lo = n_lo[i]
            coord.hi = n_hi[i] if n_hi is not None else math.inf

    def total_log_prob(self, n):
        # fixed summation order keeps results independent of how responses were computed
        total = 0.0
        for i, coord in self.coords.items():
            total += coord.log_prob(n[i])
        return total

    def vertex(self):
        return np.array([float(b.wins) for b in self.bets])

    def active(self, n):
        return tuple(i for i in self.coords if n[i] > self.bets[i].wins)


class _Converged(Exception):
    def __init__(self, log_lam):
        self.log_lam = log_lam


def _bracket_search(dual, residual, tol):
    """Find log_lam with residual(n(log_lam)) ~ 0; residual increases with lam."""
    lo, hi = LOG_LAM_MIN, LOG_LAM_MAX
    n_lo = dual.ticket_counts(lo)
    r_lo = residual(n_lo)
    if r_lo >= 0:
        return lo, n_lo, r_lo
    # expand a bracket outward from a data-driven starting multiplier
    start = min(max(-math.log(max(c.vertex_slope / c.cost for c in dual.coords.values())), lo), hi)
    n_hi = None
    step = 2.0
    probe = start
    while True:
        n_probe = dual.ticket_counts(probe)
        r_probe = residual(n_probe)
        if r_probe >= 0:
            hi, n_hi = probe, n_probe
            break
        lo, n_lo = probe, n_probe
        if probe >= LOG_LAM_MAX:
            raise ConvergenceError("constraint cannot be met inside the multiplier range", n_probe)
        probe = min(probe + step, LOG_LAM_MAX)
        step *= 2.0
    dual.narrow(n_lo, n_hi)

    cache = {}
    stop = _EARLY_STOP * tol

    def f(log_lam):
        n = dual.ticket_counts(log_lam)
        r = residual(n)
        cache[log_lam] = (n, r)
        if abs(r) <= stop:
            raise _Converged(log_lam)
        return r

    if r_probe == 0.0:
        return hi, n_hi, 0.0
    try:
        # disp=False: an exhausted iteration cap surfaces through the residual check below
        root = brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=MAX_OUTER, disp=False)
    except _Converged as done:
        root = done.log_lam
    n, r = cache.get(root) or (dual.ticket_counts(root), None)
    if r is None:
        r = residual(n)
    if abs(r) > tol:
        raise ConvergenceError(f"dual search stalled with residual {float(r)!r}", n)
    return root, n, r


def solve_min_spend(prob):
    """Globally minimal c . n subject to n >= w and prod_i D(n_i; w_i, p_i) >= eps."""
    if not isinstance(prob, MinSpendProblem):
        raise TypeError("expected a MinSpendProblem")
    dual = _Dual(prob.bets)
    log_eps = math.log(prob.eps)
    n_w = dual.vertex()
    for i, b in enumerate(prob.bets):
        if b.wins == 0:
            n_w[i] = 0.0
    vertex_log_prob = dual.total_log_prob(n_w)
    if vertex_log_prob >= log_eps:
        return SpendBound(
            n_star=n_w,
            spend=float(dual.costs @ n_w),
            achieved_log_prob=vertex_log_prob,
            active_set=(),
            converged=True,
            iterations=0,
            costs=dual.costs,
        )
    tol = REL_TOL * abs(log_eps)
    _, n, r = _bracket_search(dual, lambda n: dual.total_log_prob(n) - log_eps, tol)
    return SpendBound(
        n_star=n,
        spend=float(dual.costs @ n),
        achieved_log_prob=r + log_eps,
        active_set=dual.active(n),
        converged=True,
        iterations=dual.calls,
        costs=dual.costs,
    )


def solve_max_prob(prob):
    """Maximal prod_i D(n_i; w_i, p_i) subject to n >= w and c . n <= budget.

    Returns a MaxProbResult, which also unpacks as ``(n_star, log_prob)``.
    """
    if not isinstance(prob, MaxProbProblem):
        raise TypeError("expected a MaxProbProblem")
    dual = _Dual(prob.bets)
    n_w = dual.vertex()
    for i, b in enumerate(prob.bets):
        if b.wins == 0:
            n_w[i] = 0.0
    vertex_cost = float(dual.costs @ n_w)
    if not dual.coords or prob.budget <= vertex_cost * (1.0 + 1e-12):
        return MaxProbResult(n_w, dual.total_log_prob(n_w), vertex_cost, (), 0)
    budget = prob.budget
    _, n, _ = _bracket_search(dual, lambda n: float(dual.costs @ n) - budget, REL_TOL * budget)
    return MaxProbResult(
        n_star=n,
        log_prob=dual.total_log_prob(n),
        spend=float(dual.costs @ n),
        active_set=dual.active(n),
        iterations=dual.calls,
    )


def solve_min_spend_subset(prob, keep):
    """Min-spend over the bets in ``keep`` only: a relaxed lower bound for ``prob``."""
    keep = tuple(sorted(set(keep)))
    if not keep:
        raise ParameterError("keep must name at least one bet")
    if keep[0] < 0 or keep[-1] >= len(prob.bets):
        raise ParameterError(f"bet index out of range in {keep!r}")
    sub = MinSpendProblem(tuple(prob.bets[i] for i in keep), prob.eps)
    bound = solve_min_spend(sub)
    bound.relaxed = len(keep) < len(prob.bets)
    bound.keep = keep
    bound.active_set = tuple(keep[i] for i in bound.active_set)
    return bound
