import math

import numpy as np
import pytest
from scipy.stats import binom

from luckcheck.oracles import (
    EXACT_TAIL_MAX_N,
    OracleError,
    exact_binomial_cdf,
    exact_binomial_tail,
    grid_min_spend,
    simulate_ruin,
)
from luckcheck.ruin import BankrollScenario, TicketSpec


@pytest.mark.parametrize("n, w, p", [(10, 3, 0.2), (100, 1, 0.01), (1000, 40, 0.03), (50, 50, 0.5)])
def test_tail_against_scipy_binomial(n, w, p):
    assert exact_binomial_tail(n, w, p) == pytest.approx(binom.sf(w - 1, n, p), rel=1e-12)


def test_tail_small_cases_by_hand():
    assert exact_binomial_tail(2, 1, 0.5) == pytest.approx(0.75, rel=1e-15)
    assert exact_binomial_tail(3, 3, 0.1) == pytest.approx(1e-3, rel=1e-14)
    assert exact_binomial_tail(5, 0, 0.3) == 1.0


def test_tail_and_cdf_are_complementary():
    n, p = 200, 0.07
    for w in (1, 5, 14, 30):
        total = exact_binomial_tail(n, w, p) + exact_binomial_cdf(n, w - 1, p)
        assert total == pytest.approx(1.0, abs=1e-14)


def test_size_guard():
    with pytest.raises(OracleError):
        exact_binomial_tail(EXACT_TAIL_MAX_N + 1, 3, 0.1)
    with pytest.raises(OracleError):
        exact_binomial_tail(10, 11, 0.1)


def test_grid_single_bet_is_integer_threshold():
    n, spend = grid_min_spend([(1, 0.1, 1)], 0.5, radius=50)
    # 1 - 0.9^n >= 0.5 first at n = 7
    assert n[0] == 7 and spend == 7


def test_grid_two_bets_respects_constraint():
    bets = [(1, 0.05, 1), (3, 0.02, 1)]
    n, spend = grid_min_spend(bets, 0.01, radius=300)
    lp = sum(math.log(exact_binomial_tail(int(k), b[2], b[1])) for k, b in zip(n, bets))
    assert lp >= math.log(0.01)
    assert spend == pytest.approx(np.dot([1, 3], n))


def test_grid_reports_when_radius_is_too_small():
    with pytest.raises(OracleError):
        grid_min_spend([(1, 1e-4, 5)], 1e-3, radius=10)


def test_simulation_is_reproducible_per_seed():
    s = BankrollScenario(20, TicketSpec(1, 5, 0.1))
    a = simulate_ruin(s, trials=5000, seed=3)
    b = simulate_ruin(s, trials=5000, seed=3)
    c = simulate_ruin(s, trials=5000, seed=4)
    assert a == b
    assert a.mean_T != c.mean_T


def test_simulation_never_ends_with_a_playable_bankroll():
    s = BankrollScenario(17, TicketSpec(2, 7, 0.2))
    sim = simulate_ruin(s, trials=2000, seed=1)
    assert 0 <= sim.mean_final < 2
