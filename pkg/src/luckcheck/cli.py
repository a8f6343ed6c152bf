"""Command-line entry point: ``luckcheck`` or ``python -m luckcheck``.

Exit codes: 0 success, 1 bad input, 2 at least one gambler flagged.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import checks
from .betamath import ParameterError
from .oracles import simulate_ruin
from .ruin import AssumptionError, BankrollScenario, TicketSpec, expected_prize_count, expected_stopping_time_bounds
from .screening import (
    InputError,
    ScreeningConfig,
    bundled_catalog,
    bundled_claims,
    load_catalog,
    load_claims,
    screen,
)
from .solver import Bet, InfeasibleBudgetError, MaxProbProblem, MinSpendProblem, solve_max_prob, solve_min_spend

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FLAGGED = 2

_DEFAULTS = ScreeningConfig()


def _number(text):
    """Float that also accepts fractions such as 1/10000."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _bet(text):
    try:
        cost, prob, wins = text.split(":")
        return Bet(float(Fraction(cost)), float(Fraction(prob)), int(wins))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected cost:prob:wins, got {text!r} ({exc})") from None


def _add_screen_options(p):
    p.add_argument("--eps", type=float, default=_DEFAULTS.eps, help="rarity threshold (default %(default)g)")
    p.add_argument("--population", type=float, default=_DEFAULTS.population,
                   help="number of gamblers N for the union bound (default %(default)g)")
    p.add_argument("--take-home-rate", type=float, default=_DEFAULTS.take_home_rate,
                   help="fraction of prizes assumed available to re-bet (default %(default)g)")
    p.add_argument("--threshold", type=float, default=_DEFAULTS.flag_spend_threshold,
                   help="flag spend above this many dollars (default %(default)g)")
    p.add_argument("--reporting-threshold", type=float, default=_DEFAULTS.reporting_threshold,
                   help="smallest prize that appears in claim records (default %(default)g)")


def build_parser():
    parser = argparse.ArgumentParser(prog="luckcheck", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("screen", help="screen prize-claim records")
    p.add_argument("claims", nargs="?", help="claims CSV (default: bundled fixture)")
    p.add_argument("--catalog", help="bet catalog CSV (default: bundled Play 4 catalog)")
    _add_screen_options(p)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; screening draws no random numbers")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--format", choices=("table", "tree"), default="table")

    p = sub.add_parser("min-spend", help="minimum spend for a win record")
    p.add_argument("--bet", type=_bet, action="append", required=True, metavar="COST:PROB:WINS")
    p.add_argument("--eps", type=float, default=_DEFAULTS.eps)

    p = sub.add_parser("max-prob", help="highest win probability under a budget")
    p.add_argument("--bet", type=_bet, action="append", required=True, metavar="COST:PROB:WINS")
    p.add_argument("--budget", type=float, required=True)

    p = sub.add_parser("ruin", help="expected tickets and prizes before going broke")
    p.add_argument("bankroll", type=float)
    p.add_argument("cost", type=float)
    p.add_argument("prize", type=float)
    p.add_argument("win_prob", type=_number)
    p.add_argument("--simulate", action="store_true", help="also run a Monte Carlo check")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bkr-check", help="randomized checks of the box-operation identities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=500)
    return parser


def _cmd_screen(args, out):
    config = ScreeningConfig(
        eps=args.eps,
        population=args.population,
        flag_spend_threshold=args.threshold,
        take_home_rate=args.take_home_rate,
        reporting_threshold=args.reporting_threshold,
    )
    catalog = load_catalog(args.catalog) if args.catalog else bundled_catalog()
    if args.claims:
        claims = load_claims(args.claims, reporting_threshold=config.reporting_threshold)
    else:
        claims = bundled_claims()
    report = screen(claims, catalog, config)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text if args.format == "tree" else report.to_table())
    return EXIT_FLAGGED if report.flagged else EXIT_OK


def _cmd_min_spend(args, out):
    bound = solve_min_spend(MinSpendProblem(args.bet, args.eps))
    out.write(f"min spend      {bound.spend:,.2f}\n")
    out.write(f"tickets        {', '.join(f'{x:.2f}' for x in bound.n_star)}\n")
    out.write(f"rounded spend  {bound.spend_rounded:,.2f}\n")
    out.write(f"probability    {bound.achieved_prob:.6g}\n")
    return EXIT_OK


def _cmd_max_prob(args, out):
    result = solve_max_prob(MaxProbProblem(args.bet, args.budget))
    out.write(f"max probability  {result.prob:.6g}\n")
    out.write(f"tickets          {', '.join(f'{x:.2f}' for x in result.n_star)}\n")
    out.write(f"spend            {result.spend:,.2f}\n")
    return EXIT_OK


def _cmd_ruin(args, out):
    s = BankrollScenario(args.bankroll, TicketSpec(args.cost, args.prize, args.win_prob))
    b = expected_stopping_time_bounds(s)
    out.write(f"E[T] in ({b.lower:.6g}, {b.upper:.6g}]\n")
    if b.exact is not None:
        out.write(f"E[T] exact      {b.exact:.6g}\n")
    out.write(f"expected prizes {expected_prize_count(s):.6g}\n")
    if args.simulate:
        sim = simulate_ruin(s, trials=args.trials, seed=args.seed)
        out.write(f"simulated E[T]  {sim.mean_T:.6g} +/- {sim.se_T:.3g}\n")
        out.write(f"simulated wins  {sim.mean_wins:.6g} +/- {sim.se_wins:.3g}\n")
    return EXIT_OK


def _cmd_bkr_check(args, out):
    results = checks.run_suites(seed=args.seed, instances=args.instances)
    status = EXIT_OK
    for name, res in results.items():
        out.write(f"{'PASS' if res.ok else 'FAIL'}  {name:<32} {res.passed}/{res.passed + res.failed}\n")
        if not res.ok:
            status = EXIT_INPUT
    for desc, (got, want) in checks.check_skip_example().items():
        ok = sorted(got) == sorted(want)
        out.write(f"{'PASS' if ok else 'FAIL'}  {desc:<32} {got}\n")
        if not ok:
            status = EXIT_INPUT
    return status


_COMMANDS = {
    "screen": _cmd_screen,
    "min-spend": _cmd_min_spend,
    "max-prob": _cmd_max_prob,
    "ruin": _cmd_ruin,
    "bkr-check": _cmd_bkr_check,
}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err)
    try:
        return _COMMANDS[args.command](args, out)
    except (InputError, ParameterError, InfeasibleBudgetError, AssumptionError, ValueError, OSError) as exc:
        err.write(f"luckcheck: error: {exc}\n")
        return EXIT_INPUT
