"""Screening lottery prize records for implausible luck."""

from .betamath import (
    DomainError,
    ParameterError,
    TailQuery,
    log_tail_prob,
    min_tickets,
    min_tickets_continuous,
    tail_prob,
)
from .ruin import (
    AssumptionError,
    BankrollScenario,
    TicketSpec,
    expected_prize_count,
    expected_stopping_time_bounds,
    expected_value,
)
from .screening import (
    ScreeningConfig,
    assess_budget_plausibility,
    build_profiles,
    load_catalog,
    load_claims,
    min_spend_for_profile,
    population_adjust,
    screen,
)
from .solver import (
    Bet,
    ConvergenceError,
    InfeasibleBudgetError,
    MaxProbProblem,
    MinSpendProblem,
    solve_max_prob,
    solve_min_spend,
    solve_min_spend_subset,
)

__version__ = "0.1.0"
