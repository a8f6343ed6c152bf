"""How the four-class solves move with eps, budget and p.

Used to look for any reading of the inputs that lands on a min spend near
$96,354 together with a max probability near 0.0016.
"""

import math

from scipy.optimize import brentq

from luckcheck import MaxProbProblem, MinSpendProblem, solve_max_prob, solve_min_spend

COSTS = (1, 50, 100, 200)
WINS = (2, 1, 1, 2)


def bets(p, costs=COSTS, wins=WINS):
    return [(c, p, w) for c, w in zip(costs, wins)]


def spend(eps, p=1e-4, **kw):
    return solve_min_spend(MinSpendProblem(bets(p, **kw), eps)).spend


def max_prob(budget, p=1e-4, **kw):
    return solve_max_prob(MaxProbProblem(bets(p, **kw), budget)).prob


def main():
    print("eps sweep (p = 1e-4)")
    for eps in (1e-16, 1e-15, 5e-14, 1e-12, 1e-10, 1e-8, 1e-7):
        print(f"  eps={eps:8.0e}  min spend ${spend(eps):>14,.2f}")
    eps_hit = math.exp(brentq(lambda le: spend(math.exp(le)) - 96_354, math.log(1e-12), math.log(1e-3)))
    print(f"  eps giving $96,354: {eps_hit:.3e}")

    print("budget sweep (p = 1e-4)")
    for budget in (1e5, 3e5, 1e6, 1.85e6, 5e6):
        print(f"  budget ${budget:>12,.0f}  max probability {max_prob(budget):.6f}")
    b_hit = brentq(lambda b: max_prob(b) - 0.0016, 1e4, 1.85e6)
    print(f"  budget giving 0.0016: ${b_hit:,.0f}")

    print("alternative readings")
    for label, kw in [
        ("p = 1e-5", dict(p=1e-5)),
        ("p = 6e-5", dict(p=6e-5)),
        ("all $1 classes", dict(costs=(1, 1, 1, 1))),
        ("observed wagers 52/1/101/2/212/200", dict(costs=(52, 1, 101, 2, 212, 200), wins=(1,) * 6)),
    ]:
        p = kw.pop("p", 1e-4)
        print(f"  {label:<34} min spend ${spend(5e-14, p, **kw):>14,.2f}   "
              f"max prob {max_prob(1.85e6, p, **kw):.3e}")


if __name__ == "__main__":
    main()
