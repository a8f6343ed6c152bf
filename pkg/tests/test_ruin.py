import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from luckcheck.oracles import simulate_ruin
from luckcheck.ruin import (
    AssumptionError,
    BankrollScenario,
    TicketSpec,
    expected_prize_count,
    expected_stopping_time_bounds,
    expected_value,
)


def test_expected_value():
    assert expected_value(TicketSpec(1, 800, 6e-4)) == pytest.approx(-0.52)


def test_six_way_box_prize_count():
    s = BankrollScenario(175_000, TicketSpec(1, 800, 6e-4))
    assert expected_prize_count(s) == pytest.approx(201.92, abs=0.01)


def test_exact_case_bounds():
    b = expected_stopping_time_bounds(BankrollScenario(175_000, TicketSpec(1, 800, 6e-4)))
    assert b.exact == b.upper == pytest.approx(175_000 / 0.52)
    assert b.lower == pytest.approx(174_999 / 0.52)


def test_non_multiple_has_no_exact_value():
    b = expected_stopping_time_bounds(BankrollScenario(10.5, TicketSpec(1, 3, 0.1)))
    assert b.exact is None and b.lower < b.upper


def test_worthless_ticket_is_spent_one_by_one():
    b = expected_stopping_time_bounds(BankrollScenario(100, TicketSpec(1, 5000, 0.0)))
    assert b.exact == 100
    assert expected_prize_count(BankrollScenario(100, TicketSpec(1, 5000, 0.0))) == 0


def test_rejects_favourable_ticket():
    with pytest.raises(AssumptionError):
        expected_stopping_time_bounds(BankrollScenario(10, TicketSpec(1, 20, 0.1)))
    with pytest.raises(AssumptionError):
        expected_prize_count(BankrollScenario(10, TicketSpec(1, 10, 0.1)))


def test_validation():
    with pytest.raises(ValueError):
        TicketSpec(0, 5, 0.1)
    with pytest.raises(ValueError):
        TicketSpec(1, 5, 1.0)
    with pytest.raises(ValueError):
        BankrollScenario(0.5, TicketSpec(1, 5, 0.1))


@settings(max_examples=200, deadline=None)
@given(
    s0=st.floats(1, 1e6),
    c=st.floats(0.5, 10),
    ratio=st.floats(0, 0.95),
    p=st.floats(1e-5, 0.5),
)
def test_bounds_are_ordered(s0, c, ratio, p):
    s0 = max(s0, c)
    prize = ratio * c / p
    b = expected_stopping_time_bounds(BankrollScenario(s0, TicketSpec(c, prize, p)))
    assert 0 <= b.lower < b.upper
    assert b.upper - b.lower == pytest.approx(c / (c - p * prize), rel=1e-9)


@pytest.mark.parametrize(
    "s0, c, j, p",
    [(20, 1, 5, 0.1), (30, 2, 10, 0.15), (50, 1, 3, 0.25)],
)
def test_monte_carlo_agrees_with_wald(s0, c, j, p):
    s = BankrollScenario(s0, TicketSpec(c, j, p))
    b = expected_stopping_time_bounds(s)
    sim = simulate_ruin(s, trials=20_000, seed=11)
    assert abs(sim.mean_T - b.exact) <= 3 * sim.se_T
    assert abs(sim.mean_wins - expected_prize_count(s)) <= 3 * sim.se_wins
