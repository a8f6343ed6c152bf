"""Recompute the headline numbers: forward/reverse tails, ruin, union bound, four-class solves."""

from luckcheck import (
    BankrollScenario,
    MaxProbProblem,
    MinSpendProblem,
    TicketSpec,
    expected_prize_count,
    min_tickets,
    population_adjust,
    solve_max_prob,
    solve_min_spend,
    tail_prob,
)

FOUR_CLASSES = [(1, 1e-4, 2), (50, 1e-4, 1), (100, 1e-4, 1), (200, 1e-4, 2)]


def main():
    d = tail_prob((175_000, 57, 1e-4))
    print(f"P(57+ straight wins from 175,000 tickets)      {d:.4e}")
    print(f"tickets needed for 57 wins at eps = 5e-14       {min_tickets(57, 1e-4, 5e-14):,.0f}")
    print(f"union bound over 1.9e7 gamblers                 {population_adjust(d, 1.9e7):.3e}")
    s = BankrollScenario(175_000, TicketSpec(1, 800, 6e-4))
    print(f"6-way box prizes from $175,000 recycled         {expected_prize_count(s):.1f}")

    bound = solve_min_spend(MinSpendProblem(FOUR_CLASSES, 5e-14))
    print(f"four classes, min spend at eps = 5e-14          ${bound.spend:,.2f}")
    print(f"    tickets per class                           {[round(float(x), 2) for x in bound.n_star]}")
    print(f"    whole-ticket round-up                       ${bound.spend_rounded:,.0f}")
    result = solve_max_prob(MaxProbProblem(FOUR_CLASSES, 1.85e6))
    print(f"four classes, max probability at $1.85M        {result.prob:.6f} (1 in {1 / result.prob:,.0f})")
    print(f"    tickets per class                           {[round(float(x)) for x in result.n_star]}")


if __name__ == "__main__":
    main()
