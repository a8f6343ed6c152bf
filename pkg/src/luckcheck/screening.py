"""From prize-claim records to per-gambler plausibility verdicts.

Pipeline: load a bet catalog and claim records, fold each gambler's claims
into wins per (bet type, wager size) class, then either

* solve for the minimum spend that makes the win record an eps-probability
  event (when no single draw paid out on two different bet types), or
* maximize the win probability under a budget derived from take-home prizes
  (when it did, since the independence bound no longer applies).

A population of N gamblers all spending that much would produce such a
record with probability at most N * eps.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
import math
import os
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .solver import (
    Bet,
    InfeasibleBudgetError,
    MaxProbProblem,
    MinSpendProblem,
    SpendBound,
    solve_max_prob,
    solve_min_spend,
)

__all__ = [
    "InputError",
    "DependentWinsError",
    "BetCatalogEntry",
    "ClaimRecord",
    "UnitClass",
    "GamblerProfile",
    "ScreeningConfig",
    "GamblerResult",
    "ScreeningReport",
    "load_catalog",
    "bundled_catalog",
    "load_claims",
    "bundled_claims",
    "build_profiles",
    "min_spend_for_profile",
    "assess_budget_plausibility",
    "population_adjust",
    "screen",
]

log = logging.getLogger(__name__)

CATALOG_FIELDS = ("bet_id", "game", "cost", "win_prob", "prize", "recordable")
CLAIM_FIELDS = ("gambler_id", "claim_date", "bet_id", "prize_amount", "draw_id", "units")

PLAUSIBLE = "plausibly-lucky"
IMPLAUSIBLE = "implausible"
INSUFFICIENT = "insufficient-data"

ROUTE_MIN_SPEND = "min-spend"
ROUTE_BUDGET = "budget-plausibility"


class InputError(ValueError):
    """Malformed or invalid input row; ``line`` is 1-based and counts the header."""

    def __init__(self, message, source=None, line=None, field=None):
        self.source = source
        self.line = line
        self.field = field
        where = ""
        if source is not None:
            where += f"{source}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class DependentWinsError(ValueError):
    """Some draw paid out on more than one bet type; use the budget assessment."""


@dataclass(frozen=True)
class BetCatalogEntry:
    bet_id: str
    game: str
    cost: float
    win_prob: float
    prize: float
    recordable: bool

    def __post_init__(self):
        if not self.cost > 0:
            raise ValueError("cost must be positive")
        if not 0.0 < self.win_prob < 1.0:
            raise ValueError("win_prob must lie strictly inside (0, 1)")
        if self.prize < 0:
            raise ValueError("prize must be non-negative")


@dataclass(frozen=True)
class ClaimRecord:
    gambler_id: str
    claim_date: dt.date
    bet_id: str
    prize_amount: float
    draw_id: str | None = None
    units: int = 1

    def __post_init__(self):
        if self.units < 1 or int(self.units) != self.units:
            raise ValueError("units must be a positive integer")

    @property
    def draw_key(self):
        if self.draw_id:
            return ("draw", self.draw_id)
        return ("date", self.claim_date.isoformat())


@dataclass(frozen=True)
class UnitClass:
    """Wins on one bet type at one wager size (``units`` times the base ticket)."""

    bet_id: str
    units: int
    cost: float
    win_prob: float
    prize: float
    wins: int

    def as_bet(self):
        return Bet(self.cost, self.win_prob, self.wins)


@dataclass(frozen=True)
class GamblerProfile:
    gambler_id: str
    classes: tuple
    dependent_wins: tuple = ()
    claims: int = 0
    total_prize: float = 0.0
    merged_same_date: bool = False

    @property
    def wins(self):
        """Wins per bet type, summed over wager sizes."""
        out = defaultdict(int)
        for c in self.classes:
            out[c.bet_id] += c.wins
        return dict(out)

    @property
    def unit_classes(self):
        return {(c.bet_id, c.units): c.wins for c in self.classes}

    @property
    def vertex_cost(self):
        return sum(c.cost * c.wins for c in self.classes)


@dataclass(frozen=True)
class ScreeningConfig:
    eps: float = 5e-14
    population: float = 1.9e7
    flag_spend_threshold: float = 100_000.0
    take_home_rate: float = 0.65
    reporting_threshold: float = 600.0
    population_line: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.population < 1:
            raise ValueError("population must be at least 1")
        if not 0.0 < self.take_home_rate <= 1.0:
            raise ValueError("take_home_rate must lie in (0, 1]")
        if self.flag_spend_threshold < 0 or self.reporting_threshold < 0:
            raise ValueError("thresholds must be non-negative")


# ---------------------------------------------------------------- ingestion


def _open_text(source):
    """Return (text, name) for a path, a file object, or literal CSV text."""
    if hasattr(source, "read"):
        return source.read(), getattr(source, "name", "<stream>")
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read(), os.fspath(source)
    return source, "<text>"


def _rows(source, expected):
    text, name = _open_text(source)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or not any(h.strip() for h in header):
        return name, []
    header = [h.strip() for h in header]
    if tuple(header) != expected:
        raise InputError(f"expected header {','.join(expected)}, got {','.join(header)}", name, 1)
    rows = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(expected):
            raise InputError(f"expected {len(expected)} fields, got {len(row)}", name, line_no)
        rows.append((line_no, dict(zip(expected, (cell.strip() for cell in row)))))
    return name, rows


def _parse_number(text, field_name, name, line):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{field_name} is not a number: {text!r}", name, line, field_name) from None


_TRUE = {"true", "yes", "1", "y", "t"}
_FALSE = {"false", "no", "0", "n", "f"}


def load_catalog(source):
    """Read a bet catalog (header ``bet_id,game,cost,win_prob,prize,recordable``)."""
    name, rows = _rows(source, CATALOG_FIELDS)
    if not rows:
        warnings.warn(f"bet catalog {name} is empty", stacklevel=2)
        return []
    seen = set()
    out = []
    for line, r in rows:
        if not r["bet_id"]:
            raise InputError("empty bet_id", name, line, "bet_id")
        if r["bet_id"] in seen:
            raise InputError(f"duplicate bet_id {r['bet_id']!r}", name, line, "bet_id")
        seen.add(r["bet_id"])
        cost = _parse_number(r["cost"], "cost", name, line)
        win_prob = _parse_number(r["win_prob"], "win_prob", name, line)
        prize = _parse_number(r["prize"], "prize", name, line)
        flag = r["recordable"].lower()
        if flag not in _TRUE | _FALSE:
            raise InputError(f"recordable must be true/false, got {r['recordable']!r}", name, line, "recordable")
        if not cost > 0:
            raise InputError(f"cost must be positive, got {cost}", name, line, "cost")
        if not 0.0 < win_prob < 1.0:
            raise InputError(f"win_prob must lie strictly inside (0, 1), got {win_prob}", name, line, "win_prob")
        if prize < 0:
            raise InputError(f"prize must be non-negative, got {prize}", name, line, "prize")
        out.append(BetCatalogEntry(r["bet_id"], r["game"], cost, win_prob, prize, flag in _TRUE))
    return out


def load_claims(source, reporting_threshold=600.0):
    """Read claims (header ``gambler_id,claim_date,bet_id,prize_amount,draw_id,units``)."""
    name, rows = _rows(source, CLAIM_FIELDS)
    out = []
    for line, r in rows:
        if not r["gambler_id"]:
            raise InputError("empty gambler_id", name, line, "gambler_id")
        try:
            date = dt.date.fromisoformat(r["claim_date"])
        except ValueError:
            raise InputError(f"claim_date is not an ISO-8601 date: {r['claim_date']!r}", name, line, "claim_date") from None
        prize = _parse_number(r["prize_amount"], "prize_amount", name, line)
        if prize < reporting_threshold:
            raise InputError(
                f"prize_amount {prize} is below the reporting threshold {reporting_threshold}",
                name, line, "prize_amount",
            )
        units_text = r["units"] or "1"
        try:
            units = int(units_text)
        except ValueError:
            raise InputError(f"units must be an integer, got {units_text!r}", name, line, "units") from None
        if units < 1:
            raise InputError(f"units must be at least 1, got {units}", name, line, "units")
        out.append(ClaimRecord(r["gambler_id"], date, r["bet_id"], prize, r["draw_id"] or None, units))
    return out


def _data_path(filename):
    return resources.files("luckcheck").joinpath("data", filename)


def bundled_catalog():
    """The Play 4 straight and box bets shipped with the package."""
    with _data_path("play4_catalog.csv").open(encoding="utf-8") as fh:
        return load_catalog(fh)


def bundled_claims():
    """Fixture: a straight-only frequent winner and a multi-unit bold player."""
    with _data_path("fixture_claims.csv").open(encoding="utf-8") as fh:
        return load_claims(fh)


# ---------------------------------------------------------------- profiles


def _profile(gambler_id, claims, catalog_by_id):
    missing = sorted({c.bet_id for c in claims if c.bet_id not in catalog_by_id})
    if missing:
        raise InputError(f"unknown bet_id(s) for gambler {gambler_id!r}: {', '.join(missing)}")
    # one wager = all claims on one bet type in one draw (or one date when draw_id is absent)
    wagers = defaultdict(int)
    rows_per_wager = defaultdict(int)
    for c in claims:
        key = (c.bet_id, c.draw_key)
        wagers[key] += c.units
        rows_per_wager[key] += 1
    merged = any(
        n > 1 and key[1][0] == "date" for key, n in rows_per_wager.items()
    )
    class_wins = defaultdict(int)
    for (bet_id, _), units in wagers.items():
        class_wins[(bet_id, units)] += 1
    classes = []
    for (bet_id, units) in sorted(class_wins):
        e = catalog_by_id[bet_id]
        classes.append(UnitClass(bet_id, units, units * e.cost, e.win_prob, units * e.prize, class_wins[(bet_id, units)]))
    bets_per_draw = defaultdict(set)
    for c in claims:
        if c.draw_id:
            bets_per_draw[c.draw_id].add(c.bet_id)
    dependent = tuple(sorted(d for d, bets in bets_per_draw.items() if len(bets) > 1))
    return GamblerProfile(
        gambler_id=gambler_id,
        classes=tuple(classes),
        dependent_wins=dependent,
        claims=sum(c.units for c in claims),
        total_prize=float(math.fsum(c.prize_amount for c in claims)),
        merged_same_date=merged,
    )


def _by_gambler(claims):
    groups = defaultdict(list)
    for c in claims:
        groups[c.gambler_id].append(c)
    return dict(sorted(groups.items()))


def build_profiles(claims, catalog):
    """One GamblerProfile per gambler, sorted by gambler_id."""
    catalog_by_id = {e.bet_id: e for e in catalog}
    groups = _by_gambler(claims)
    missing = sorted({c.bet_id for c in claims if c.bet_id not in catalog_by_id})
    if missing:
        raise InputError(f"unknown bet_id(s): {', '.join(missing)}")
    return [_profile(g, cs, catalog_by_id) for g, cs in groups.items()]


# ---------------------------------------------------------------- analysis


def min_spend_for_profile(profile, config=ScreeningConfig()):
    """Lower bound on what the gambler spent, treating bet classes as independent."""
    if profile.dependent_wins:
        raise DependentWinsError(
            f"gambler {profile.gambler_id!r} won more than one bet type in draw(s) "
            f"{', '.join(profile.dependent_wins)}; use assess_budget_plausibility instead"
        )
    bets = [c.as_bet() for c in profile.classes]
    if not bets:
        return SpendBound(np.zeros(0), 0.0, 0.0, (), True, 0, costs=np.zeros(0))
    return solve_min_spend(MinSpendProblem(bets, config.eps))


def _budget_solve(profile, budget, config):
    if budget is None:
        budget = config.take_home_rate * profile.total_prize
    bets = [c.as_bet() for c in profile.classes]
    if not bets:
        return budget, None
    return budget, solve_max_prob(MaxProbProblem(bets, budget))


def assess_budget_plausibility(profile, budget=None, config=ScreeningConfig()):
    """Highest probability of the observed wins for a gambler who spent ``budget``.

    ``budget`` defaults to take_home_rate times the gambler's total prizes.
    """
    _, result = _budget_solve(profile, budget, config)
    return 1.0 if result is None else result.prob


def population_adjust(prob, N):
    """Union bound over N gamblers: min(1, N * prob)."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {prob!r}")
    if N < 1:
        raise ValueError(f"population must be at least 1, got {N!r}")
    return min(1.0, N * prob)


@dataclass
class GamblerResult:
    gambler_id: str
    claims: int
    wins: dict
    unit_classes: list
    dependent_wins: list
    route: str | None
    verdict: str
    min_spend: float | None = None
    min_spend_rounded: float | None = None
    tickets: list | None = None
    achieved_prob: float | None = None
    budget: float | None = None
    budget_prob: float | None = None
    population_adjusted: float | None = None
    notes: list = field(default_factory=list)
    error: str | None = None

    @property
    def implied_spend(self):
        return self.min_spend if self.min_spend is not None else self.budget


@dataclass
class ScreeningReport:
    config: ScreeningConfig
    results: list

    @property
    def flagged(self):
        return [r for r in self.results if r.verdict == IMPLAUSIBLE]

    def to_tree(self):
        return {
            "settings": asdict(self.config),
            "gamblers": [asdict(r) for r in self.results],
            "summary": {
                "gamblers": len(self.results),
                "implausible": len(self.flagged),
                "population_times_eps": self.config.population * self.config.eps,
            },
        }

    def to_json(self):
        return json.dumps(self.to_tree(), indent=2, sort_keys=True) + "\n"

    def to_table(self):
        cfg = self.config
        lines = [
            f"eps={cfg.eps:g}  population={cfg.population:g}  N*eps={cfg.population * cfg.eps:.3g}  "
            f"flag_spend_threshold=${cfg.flag_spend_threshold:,.0f}  take_home_rate={cfg.take_home_rate:g}  "
            f"reporting_threshold=${cfg.reporting_threshold:,.0f}",
            f"{'gambler':<16} {'claims':>7} {'route':<20} {'min spend':>14} {'budget prob':>12} {'N-adjusted':>11}  verdict",
        ]
        for r in self.results:
            spend = f"${r.min_spend:,.0f}" if r.min_spend is not None else "-"
            bprob = f"{r.budget_prob:.3g}" if r.budget_prob is not None else "-"
            adj = f"{r.population_adjusted:.3g}" if r.population_adjusted is not None else "-"
            lines.append(
                f"{r.gambler_id:<16} {r.claims:>7} {r.route or '-':<20} {spend:>14} {bprob:>12} {adj:>11}  {r.verdict}"
            )
            for note in r.notes:
                lines.append(f"    note: {note}")
            if r.error:
                lines.append(f"    error: {r.error}")
        return "\n".join(lines) + "\n"


def _analyse(gambler_id, claims, catalog_by_id, config):
    try:
        profile = _profile(gambler_id, claims, catalog_by_id)
    except InputError as exc:
        return GamblerResult(gambler_id, sum(c.units for c in claims), {}, [], [], None, INSUFFICIENT, error=str(exc))

    result = GamblerResult(
        gambler_id=gambler_id,
        claims=profile.claims,
        wins=dict(sorted(profile.wins.items())),
        unit_classes=[
            {"bet_id": c.bet_id, "units": c.units, "cost": c.cost, "win_prob": c.win_prob, "wins": c.wins}
            for c in profile.classes
        ],
        dependent_wins=list(profile.dependent_wins),
        route=None,
        verdict=INSUFFICIENT,
    )
    if profile.merged_same_date:
        result.notes.append(
            "same-date claims without draw_id on one bet type were merged into a single multi-unit wager"
        )
    try:
        budget, budget_result = _budget_solve(profile, None, config)
        result.budget = budget
        result.budget_prob = 1.0 if budget_result is None else budget_result.prob
    except InfeasibleBudgetError as exc:
        result.notes.append(f"take-home budget check skipped: {exc}")
    except Exception as exc:  # per-gambler isolation
        log.warning("budget assessment failed for %s: %s", gambler_id, exc)
        result.notes.append(f"take-home budget check failed: {exc}")

    try:
        if profile.dependent_wins:
            result.route = ROUTE_BUDGET
            if result.budget_prob is None:
                result.error = "dependent wins and no feasible take-home budget"
                return result
            result.population_adjusted = population_adjust(result.budget_prob, config.population)
            result.verdict = IMPLAUSIBLE if result.population_adjusted < config.population_line else PLAUSIBLE
        else:
            result.route = ROUTE_MIN_SPEND
            bound = min_spend_for_profile(profile, config)
            result.min_spend = bound.spend
            result.min_spend_rounded = bound.spend_rounded if len(bound.n_star) else 0.0
            result.tickets = [float(x) for x in bound.n_star]
            result.achieved_prob = bound.achieved_prob
            result.population_adjusted = population_adjust(min(1.0, bound.achieved_prob), config.population)
            flagged = bound.spend > config.flag_spend_threshold and result.population_adjusted < config.population_line
            result.verdict = IMPLAUSIBLE if flagged else PLAUSIBLE
    except Exception as exc:  # per-gambler isolation
        log.warning("analysis failed for %s: %s", gambler_id, exc)
        result.verdict = INSUFFICIENT
        result.error = str(exc)
    return result


def screen(claims, catalog, config=ScreeningConfig()):
    """Analyse every gambler; results ordered by implied spend (descending), then id."""
    catalog_by_id = {e.bet_id: e for e in catalog}
    results = [_analyse(g, cs, catalog_by_id, config) for g, cs in _by_gambler(claims).items()]
    results.sort(key=lambda r: (-(r.implied_spend if r.implied_spend is not None else -math.inf), r.gambler_id))
    return ScreeningReport(config, results)
