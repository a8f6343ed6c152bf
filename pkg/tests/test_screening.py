import datetime as dt
import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from luckcheck.screening import (
    ClaimRecord,
    DependentWinsError,
    GamblerProfile,
    InputError,
    ScreeningConfig,
    UnitClass,
    assess_budget_plausibility,
    build_profiles,
    bundled_catalog,
    bundled_claims,
    load_catalog,
    load_claims,
    min_spend_for_profile,
    population_adjust,
    screen,
)
from luckcheck.solver import InfeasibleBudgetError, MinSpendProblem, solve_min_spend_subset

CLAIM_HEADER = "gambler_id,claim_date,bet_id,prize_amount,draw_id,units\n"
CATALOG_HEADER = "bet_id,game,cost,win_prob,prize,recordable\n"


def claim(g, day, bet="play4-straight", prize=5000, draw=None, units=1):
    return ClaimRecord(g, dt.date(2012, 1, 1) + dt.timedelta(days=day), bet, prize, draw, units)


@pytest.fixture(scope="module")
def catalog():
    return bundled_catalog()


@pytest.fixture(scope="module")
def fixture_report(catalog):
    return screen(bundled_claims(), catalog)


# ------------------------------------------------------------------ loading


def test_bundled_catalog(catalog):
    assert len(catalog) == 5
    by_id = {e.bet_id: e for e in catalog}
    assert by_id["play4-straight"].win_prob == 1e-4 and by_id["play4-straight"].prize == 5000
    assert by_id["play4-box4"].win_prob == pytest.approx(4e-4) and by_id["play4-box4"].prize == 1198
    assert by_id["play4-box6"].win_prob == pytest.approx(6e-4) and by_id["play4-box6"].prize == 800


def test_catalog_accepts_fractions():
    cat = load_catalog(io.StringIO(CATALOG_HEADER + "x,g,1,3/10000,100,true\n"))
    assert cat[0].win_prob == pytest.approx(3e-4)


def test_catalog_rejects_probability_above_one():
    with pytest.raises(InputError) as info:
        load_catalog(io.StringIO(CATALOG_HEADER + "x,g,1,1.5,100,true\n"))
    assert info.value.field == "win_prob" and info.value.line == 2
    assert "win_prob" in str(info.value)


def test_catalog_rejects_duplicates_with_line():
    text = CATALOG_HEADER + "x,g,1,0.1,5,true\ny,g,1,0.1,5,true\nx,g,2,0.2,5,false\n"
    with pytest.raises(InputError) as info:
        load_catalog(io.StringIO(text))
    assert info.value.line == 4


def test_catalog_rejects_malformed_row():
    with pytest.raises(InputError) as info:
        load_catalog(io.StringIO(CATALOG_HEADER + "x,g,1,0.1\n"))
    assert info.value.line == 2
    with pytest.raises(InputError):
        load_catalog(io.StringIO(CATALOG_HEADER + "x,g,one,0.1,5,true\n"))
    with pytest.raises(InputError):
        load_catalog(io.StringIO("bet,game\n"))


def test_empty_catalog_warns():
    with pytest.warns(UserWarning):
        assert load_catalog(io.StringIO("")) == []


def test_claims_loading_and_validation():
    text = CLAIM_HEADER + "a,2012-01-02,play4-straight,5000,,\nb,2012-01-03,play4-box6,800,D7,2\n"
    claims = load_claims(io.StringIO(text))
    assert claims[0].units == 1 and claims[0].draw_id is None
    assert claims[1].draw_id == "D7" and claims[1].units == 2
    with pytest.raises(InputError) as info:
        load_claims(io.StringIO(CLAIM_HEADER + "a,2012-01-02,play4-straight,100,,1\n"))
    assert info.value.field == "prize_amount"
    with pytest.raises(InputError):
        load_claims(io.StringIO(CLAIM_HEADER + "a,2012-01-02,play4-straight,700,,0\n"))
    with pytest.raises(InputError):
        load_claims(io.StringIO(CLAIM_HEADER + "a,02/01/2012,play4-straight,700,,1\n"))


def test_claims_from_path(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text(CLAIM_HEADER + "a,2012-01-02,play4-straight,5000,,1\n")
    assert len(load_claims(path)) == 1
    assert len(load_claims(str(path))) == 1


# ------------------------------------------------------------------ profiles


def test_johnson_profile(catalog):
    claims = [c for c in bundled_claims() if c.gambler_id == "johnson"]
    (profile,) = build_profiles(claims, catalog)
    assert profile.wins == {"play4-straight": 57}
    assert profile.dependent_wins == ()
    assert not profile.merged_same_date


def test_fixture_hollywood_classes(catalog):
    claims = [c for c in bundled_claims() if c.gambler_id == "hollywood"]
    (profile,) = build_profiles(claims, catalog)
    assert profile.unit_classes == {
        ("play4-straight", 1): 2,
        ("play4-straight", 50): 1,
        ("play4-straight", 100): 1,
        ("play4-straight", 200): 2,
    }
    assert [c.cost for c in profile.classes] == [1, 50, 100, 200]
    assert profile.merged_same_date


def test_same_day_box_claims_collapse_to_one_wager(catalog):
    claims = [claim("h", 0, "play4-box4", 1198) for _ in range(52)]
    (profile,) = build_profiles(claims, catalog)
    (cls,) = profile.classes
    assert (cls.units, cls.wins, cls.cost, cls.prize) == (52, 1, 52.0, 52 * 1198.0)
    assert cls.win_prob == pytest.approx(4e-4)


def test_units_column_and_draw_ids(catalog):
    claims = [claim("h", 0, units=3, draw="A"), claim("h", 0, units=2, draw="A"), claim("h", 0, draw="B")]
    (profile,) = build_profiles(claims, catalog)
    assert profile.unit_classes == {("play4-straight", 5): 1, ("play4-straight", 1): 1}
    assert not profile.merged_same_date


def test_single_claim(catalog):
    (profile,) = build_profiles([claim("x", 0)], catalog)
    assert profile.wins == {"play4-straight": 1}


def test_dependent_wins_detected(catalog):
    claims = [claim("d", 0, draw="D1"), claim("d", 0, "play4-box24", 5000 / 24 * 4, draw="D1"), claim("d", 5)]
    (profile,) = build_profiles(claims, catalog)
    assert profile.dependent_wins == ("D1",)


def test_unknown_bet_lists_offenders(catalog):
    with pytest.raises(InputError) as info:
        build_profiles([claim("x", 0, "mega"), claim("y", 0, "keno")], catalog)
    assert "keno" in str(info.value) and "mega" in str(info.value)


@settings(max_examples=100, deadline=None)
@given(
    rows=st.lists(
        st.tuples(
            st.sampled_from("abc"),
            st.integers(0, 6),
            st.sampled_from(["play4-straight", "play4-box4", "play4-box6"]),
            st.integers(1, 4),
            st.sampled_from([None, "D1", "D2"]),
        ),
        max_size=40,
    )
)
def test_profiles_conserve_claims(rows):
    cat = bundled_catalog()
    claims = [claim(g, d, b, 800, draw, u) for g, d, b, u, draw in rows]
    profiles = build_profiles(claims, cat)
    total_in = sum(c.units for c in claims)
    assert total_in == sum(cl.units * cl.wins for p in profiles for cl in p.classes)
    assert sum(p.claims for p in profiles) == total_in


# ------------------------------------------------------------------ analysis


def test_min_spend_johnson(catalog):
    (profile,) = build_profiles([c for c in bundled_claims() if c.gambler_id == "johnson"], catalog)
    bound = min_spend_for_profile(profile)
    assert 173_000 <= bound.spend <= 175_000


def test_min_spend_without_wins_is_zero():
    empty = GamblerProfile("z", ())
    assert min_spend_for_profile(empty).spend == 0.0
    unwon = GamblerProfile("z", (UnitClass("play4-straight", 1, 1.0, 1e-4, 5000.0, 0),))
    assert min_spend_for_profile(unwon).spend == 0.0


def test_min_spend_refuses_dependent_wins(catalog):
    claims = [claim("d", 0, draw="D1"), claim("d", 0, "play4-box24", 900, draw="D1")]
    (profile,) = build_profiles(claims, catalog)
    with pytest.raises(DependentWinsError, match="assess_budget_plausibility"):
        min_spend_for_profile(profile)


def test_budget_assessment_johnson(catalog):
    (profile,) = build_profiles([c for c in bundled_claims() if c.gambler_id == "johnson"], catalog)
    assert assess_budget_plausibility(profile, 175_000) == pytest.approx(6.28e-14, rel=2e-3)


def test_budget_assessment_at_vertex(catalog):
    (profile,) = build_profiles([c for c in bundled_claims() if c.gambler_id == "hollywood"], catalog)
    assert assess_budget_plausibility(profile, profile.vertex_cost) == pytest.approx(1e-24, rel=1e-12)
    with pytest.raises(InfeasibleBudgetError):
        assess_budget_plausibility(profile, profile.vertex_cost - 1)


def test_budget_defaults_to_take_home(catalog):
    (profile,) = build_profiles([c for c in bundled_claims() if c.gambler_id == "hollywood"], catalog)
    cfg = ScreeningConfig(take_home_rate=0.5)
    assert assess_budget_plausibility(profile, config=cfg) == pytest.approx(
        assess_budget_plausibility(profile, 0.5 * profile.total_prize), rel=1e-12
    )


def test_population_adjust():
    assert population_adjust(6.3e-14, 1.9e7) == pytest.approx(1.197e-6)
    assert population_adjust(0.0, 1e9) == 0.0
    assert population_adjust(0.5, 4) == 1.0
    with pytest.raises(ValueError):
        population_adjust(1.5, 2)
    with pytest.raises(ValueError):
        population_adjust(0.1, 0)


@settings(max_examples=200, deadline=None)
@given(p=st.floats(0, 1), q=st.floats(0, 1), n=st.floats(1, 1e9), m=st.floats(1, 1e9))
def test_population_adjust_monotone_and_clamped(p, q, n, m):
    lo_p, hi_p = sorted((p, q))
    lo_n, hi_n = sorted((n, m))
    assert 0 <= population_adjust(lo_p, lo_n) <= population_adjust(hi_p, lo_n) <= population_adjust(hi_p, hi_n) <= 1


def test_subset_of_bet_types_never_raises_spend(catalog):
    (profile,) = build_profiles([c for c in bundled_claims() if c.gambler_id == "hollywood"], catalog)
    prob = MinSpendProblem([c.as_bet() for c in profile.classes], 5e-14)
    full = min_spend_for_profile(profile).spend
    for keep in [(0,), (1, 3), (0, 1, 2)]:
        assert solve_min_spend_subset(prob, keep).spend <= full


# ------------------------------------------------------------------ screen


def test_fixture_verdicts(fixture_report):
    verdicts = {r.gambler_id: r.verdict for r in fixture_report.results}
    assert verdicts == {"johnson": "implausible", "hollywood": "plausibly-lucky"}
    assert [r.gambler_id for r in fixture_report.results] == ["johnson", "hollywood"]
    (h,) = [r for r in fixture_report.results if r.gambler_id == "hollywood"]
    assert h.notes and "merged" in h.notes[0]


def test_report_is_byte_identical(catalog):
    a = screen(bundled_claims(), catalog).to_json()
    b = screen(bundled_claims(), catalog).to_json()
    assert a == b
    assert screen(bundled_claims(), catalog).to_table() == screen(bundled_claims(), catalog).to_table()


def test_report_header_carries_settings(fixture_report):
    tree = fixture_report.to_tree()
    assert tree["settings"]["eps"] == 5e-14 and tree["settings"]["population"] == 1.9e7
    assert tree["summary"]["population_times_eps"] == pytest.approx(9.5e-7)
    assert "N*eps=9.5e-07" in fixture_report.to_table()


def test_one_win_is_plausible(catalog):
    (r,) = screen([claim("x", 0)], catalog).results
    assert r.verdict == "plausibly-lucky" and r.min_spend == 1.0


def test_bad_gambler_is_isolated(catalog):
    report = screen([claim("x", 0, "nope"), claim("y", 0)], catalog)
    verdicts = {r.gambler_id: r.verdict for r in report.results}
    assert verdicts == {"x": "insufficient-data", "y": "plausibly-lucky"}
    assert "nope" in [r for r in report.results if r.gambler_id == "x"][0].error


def test_dependent_profile_routes_to_budget(catalog):
    claims = [claim("d", i * 3, draw=f"D{i}") for i in range(80)]
    claims.append(claim("d", 0, "play4-box24", 900, draw="D0"))
    (r,) = screen(claims, catalog).results
    assert r.route == "budget-plausibility"
    assert r.min_spend is None and r.budget_prob is not None
    assert r.verdict == "implausible"


def test_ordering_by_spend_then_id(catalog):
    claims = [claim("b", 0), claim("a", 0), claim("c", 0), claim("c", 9)]
    ids = [r.gambler_id for r in screen(claims, catalog).results]
    assert ids == ["c", "a", "b"]


def test_empty_claims():
    report = screen([], bundled_catalog())
    assert report.results == [] and report.flagged == []


def test_verdicts_monotone_in_eps(catalog):
    # within the regime N*eps < line, a smaller eps lowers the spend bound,
    # so tightening eps can only clear a flag, never raise one
    claims = bundled_claims()
    previous = None
    for eps in [5e-14, 2e-14, 5e-15, 1e-15, 1e-16]:
        flagged = {r.gambler_id for r in screen(claims, catalog, ScreeningConfig(eps=eps)).flagged}
        if previous is not None:
            assert flagged <= previous
        previous = flagged


def test_config_validation():
    with pytest.raises(ValueError):
        ScreeningConfig(eps=0)
    with pytest.raises(ValueError):
        ScreeningConfig(take_home_rate=1.5)
    with pytest.raises(ValueError):
        ScreeningConfig(population=0)
