"""Wald-identity expectations against play-until-broke simulation."""

import argparse

from luckcheck import BankrollScenario, TicketSpec, expected_prize_count, expected_stopping_time_bounds
from luckcheck.oracles import simulate_ruin

SCENARIOS = [
    (20, 1, 5, 0.1),
    (30, 2, 10, 0.15),
    (50, 1, 3, 0.25),
    (40, 1, 20, 0.03),
    (25.5, 1, 4.5, 0.1),  # not whole multiples: only bounds
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'S0':>6} {'c':>3} {'j':>5} {'p':>5}  {'E[T] bounds':>22} {'simulated':>18} {'z':>6}  prizes exp/sim")
    for s0, c, j, p in SCENARIOS:
        s = BankrollScenario(s0, TicketSpec(c, j, p))
        b = expected_stopping_time_bounds(s)
        sim = simulate_ruin(s, trials=args.trials, seed=args.seed)
        ref = b.exact if b.exact is not None else 0.5 * (b.lower + b.upper)
        z = (sim.mean_T - ref) / sim.se_T
        print(f"{s0:>6} {c:>3} {j:>5} {p:>5}  ({b.lower:9.2f}, {b.upper:9.2f}] "
              f"{sim.mean_T:9.2f} +/- {sim.se_T:5.2f} {z:+6.2f}  "
              f"{expected_prize_count(s):.3f}/{sim.mean_wins:.3f}")


if __name__ == "__main__":
    main()
