"""How long a gambler who recycles winnings can keep buying one kind of ticket.

Model: a ticket costs ``c`` and pays ``j`` with probability ``p`` (nothing
otherwise), so the net value X of a ticket has E(X) = p j - c < 0.  The
gambler starts with bankroll S0 and buys until the bankroll drops below c.
Wald's equation gives E(S_T) = S0 + E(T) E(X) with 0 <= E(S_T) < c, hence

    (S0 - c) / |E(X)|  <  E(T)  <=  S0 / |E(X)|

with equality on the right when S0 and j are whole multiples of c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

__all__ = [
    "AssumptionError",
    "TicketSpec",
    "BankrollScenario",
    "StoppingTimeBounds",
    "expected_value",
    "expected_stopping_time_bounds",
    "expected_prize_count",
]


class AssumptionError(ValueError):
    """The ticket does not have negative expected value."""


@dataclass(frozen=True)
class TicketSpec:
    cost: float
    prize: float
    win_prob: float

    def __post_init__(self):
        if not self.cost > 0:
            raise ValueError(f"cost must be positive, got {self.cost!r}")
        if self.prize < 0:
            raise ValueError(f"prize must be non-negative, got {self.prize!r}")
        if not 0.0 <= self.win_prob < 1.0:
            raise ValueError(f"win_prob must lie in [0, 1), got {self.win_prob!r}")


@dataclass(frozen=True)
class BankrollScenario:
    bankroll: float
    ticket: TicketSpec

    def __post_init__(self):
        if self.bankroll < self.ticket.cost:
            raise ValueError(
                f"bankroll {self.bankroll!r} cannot buy a single ticket costing {self.ticket.cost!r}"
            )


class StoppingTimeBounds(NamedTuple):
    lower: float
    upper: float
    exact: Optional[float]


def expected_value(ticket):
    """E(X) = p j - c."""
    return ticket.win_prob * ticket.prize - ticket.cost


def _is_multiple(x, c):
    q = x / c
    return math.isclose(q, round(q), rel_tol=0.0, abs_tol=1e-9 * max(1.0, abs(q)))


def _drift(ticket):
    ev = expected_value(ticket)
    if ev >= 0:
        raise AssumptionError(
            f"ticket has non-negative expected value {ev!r}; the gambler never goes broke on average"
        )
    return -ev


def expected_stopping_time_bounds(s):
    """Bounds on the expected number of tickets bought before going broke."""
    drift = _drift(s.ticket)
    lower = (s.bankroll - s.ticket.cost) / drift
    upper = s.bankroll / drift
    exact = None
    if _is_multiple(s.bankroll, s.ticket.cost) and _is_multiple(s.ticket.prize, s.ticket.cost):
        exact = upper
    return StoppingTimeBounds(lower, upper, exact)


def expected_prize_count(s):
    """p S0 / (c - p j): expected number of prizes collected before going broke.

    Exact in the whole-multiple case, where E(T) = S0 / (c - p j).
    """
    t = s.ticket
    drift = _drift(t)
    return t.win_prob * s.bankroll / drift
