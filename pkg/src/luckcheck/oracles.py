"""Slow, simple reference computations for checking the fast paths.

Nothing here imports from ``betamath`` or ``solver``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "OracleError",
    "EXACT_TAIL_MAX_N",
    "exact_binomial_tail",
    "exact_binomial_cdf",
    "grid_min_spend",
    "RuinSimulation",
    "simulate_ruin",
]

EXACT_TAIL_MAX_N = 100_000
RUIN_CHUNK = 10_000


class OracleError(ValueError):
    pass


def _log_terms(n, k_lo, k_hi, p):
    """log of C(n, k) p^k (1-p)^(n-k) for k = k_lo..k_hi.

    Past the mode the terms decrease, so summation stops once the remaining
    (n - k) terms cannot add more than 1e-18 of the running maximum.
    """
    log_p = math.log(p)
    log_q = math.log1p(-p)
    mode = (n + 1) * p
    # exact big-integer anchors, ratio recurrence in between
    log_c = math.log(math.comb(n, k_lo))
    out = []
    top = -math.inf
    for k in range(k_lo, k_hi + 1):
        v = log_c + k * log_p + (n - k) * log_q
        out.append(v)
        top = max(top, v)
        if k > mode and v + math.log(n - k + 1) < top - 41.5:
            break
        if k < n:
            if (k + 1 - k_lo) % 256 == 0:
                log_c = math.log(math.comb(n, k + 1))
            else:
                log_c += math.log((n - k) / (k + 1))
    return out


def _log_sum(logs):
    if not logs:
        return -math.inf
    m = max(logs)
    return m + math.log(math.fsum(math.exp(v - m) for v in logs))


def _check(n, w, p):
    if n > EXACT_TAIL_MAX_N:
        raise OracleError(f"n={n} exceeds the exact-summation guard {EXACT_TAIL_MAX_N}")
    if not 0 <= w <= n:
        raise OracleError(f"need 0 <= w <= n, got w={w}, n={n}")
    if not 0.0 < p < 1.0:
        raise OracleError(f"p must lie in (0, 1), got {p}")


def exact_binomial_tail(n, w, p):
    """sum_{k=w}^{n} C(n, k) p^k (1-p)^(n-k) by direct summation.

    Relative error is about 1e-16 * n * |log(1 - p)|: well under 1e-12 for
    lottery-sized p, a few 1e-12 at n = 1e4, p = 0.5.
    """
    n, w = int(n), int(w)
    _check(n, w, p)
    if w == 0:
        return 1.0
    return math.exp(_log_sum(_log_terms(n, w, n, p)))


def exact_binomial_cdf(n, w, p):
    """sum_{k=0}^{w} C(n, k) p^k (1-p)^(n-k)."""
    n, w = int(n), int(w)
    _check(n, min(w, n), p)
    return math.exp(_log_sum(_log_terms(n, 0, min(w, n), p)))


def _log_tail_column(w, p, n_values):
    if w == 0:
        return np.zeros(len(n_values))
    return np.array([_log_sum(_log_terms(int(n), w, int(n), p)) for n in n_values])


def grid_min_spend(bets, eps, radius):
    """Cheapest integer ticket vector in the box [w_i, w_i + radius].

    ``bets`` is a sequence of (cost, win_prob, wins); at most two bets.
    Returns ``(n, spend)``.
    """
    bets = [tuple(b) for b in bets]
    if not 1 <= len(bets) <= 2:
        raise OracleError("grid search supports one or two bets")
    log_eps = math.log(eps)
    axes = []
    for _, p, w in bets:
        n_values = np.arange(w, w + radius + 1)
        axes.append((n_values, _log_tail_column(int(w), p, n_values)))
    costs = np.array([b[0] for b in bets], dtype=float)

    if len(bets) == 1:
        (n1, l1), = axes
        spend = costs[0] * n1
        feasible = l1 >= log_eps
        if not feasible.any():
            raise OracleError(f"no feasible point with radius {radius}")
        k = int(np.argmin(np.where(feasible, spend, np.inf)))
        return np.array([n1[k]]), float(spend[k])

    (n1, l1), (n2, l2) = axes
    total = l1[:, None] + l2[None, :]
    spend = costs[0] * n1[:, None] + costs[1] * n2[None, :]
    masked = np.where(total >= log_eps, spend, np.inf)
    k = np.unravel_index(int(np.argmin(masked)), masked.shape)
    if not np.isfinite(masked[k]):
        raise OracleError(f"no feasible point with radius {radius}")
    return np.array([n1[k[0]], n2[k[1]]]), float(masked[k])


class RuinSimulation(NamedTuple):
    mean_T: float
    se_T: float
    mean_wins: float
    se_wins: float
    mean_final: float
    seed: int
    trials: int


def _simulate_chunk(s0, c, j, p, trials, rng):
    bankroll = np.full(trials, float(s0))
    tickets = np.zeros(trials, dtype=np.int64)
    wins = np.zeros(trials, dtype=np.int64)
    alive = np.flatnonzero(bankroll >= c)
    while alive.size:
        won = rng.random(alive.size) < p
        bankroll[alive] += np.where(won, j - c, -c)
        tickets[alive] += 1
        wins[alive] += won
        alive = alive[bankroll[alive] >= c]
    return tickets, wins, bankroll


def simulate_ruin(s, trials=100_000, seed=0):
    """Play-until-broke Monte Carlo for a BankrollScenario.

    Trials run in fixed chunks of RUIN_CHUNK, each with its own child seed, so
    results do not depend on how chunks are scheduled.
    """
    if trials < 1000:
        raise OracleError("use at least 1000 trials")
    t = s.ticket
    children = np.random.SeedSequence(seed).spawn(math.ceil(trials / RUIN_CHUNK))
    parts = []
    remaining = trials
    for child in children:
        size = min(RUIN_CHUNK, remaining)
        remaining -= size
        parts.append(_simulate_chunk(s.bankroll, t.cost, t.prize, t.win_prob, size, np.random.default_rng(child)))
    tickets = np.concatenate([x[0] for x in parts]).astype(float)
    wins = np.concatenate([x[1] for x in parts]).astype(float)
    final = np.concatenate([x[2] for x in parts])
    root_n = math.sqrt(trials)
    return RuinSimulation(
        mean_T=float(tickets.mean()),
        se_T=float(tickets.std(ddof=1) / root_n),
        mean_wins=float(wins.mean()),
        se_wins=float(wins.std(ddof=1) / root_n),
        mean_final=float(final.mean()),
        seed=seed,
        trials=trials,
    )
