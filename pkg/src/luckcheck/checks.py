"""Randomized verification of the cylinder/box identities on small product spaces.

Each suite draws its instances from a numpy Generator seeded by
``(seed, suite index)``, so a suite's verdicts do not depend on which other
suites run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bkr
from .betamath import tail_prob

__all__ = ["SuiteResult", "SUITES", "run_suites", "skip_example", "check_skip_example"]

PROB_SLACK = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0

    def record(self, ok, detail=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(detail)


def _random_space(rng, max_alphabet=4, max_dims=4, uniform=False):
    size = int(rng.integers(2, max_alphabet + 1))
    dims = int(rng.integers(1, max_dims + 1))
    dists = None if uniform else [rng.dirichlet(np.ones(size)) for _ in range(dims)]
    return bkr.FiniteEventSpace(size, dims, dists)


def _random_event(rng, space):
    density = rng.uniform(0.2, 0.95)
    return space.event(rng.random(space.shape) < density)


def _random_index_set(rng, dims):
    return frozenset(int(j) for j in np.flatnonzero(rng.random(dims) < 0.5))


def _cylcomp(rng, res):
    space = _random_space(rng, max_alphabet=3, uniform=True)
    A = _random_event(rng, space)
    J = _random_index_set(rng, space.dims)
    K = _random_index_set(rng, space.dims)
    lhs = bkr.closure(bkr.closure(A, J), K)
    rhs = bkr.closure(A, J & K)
    res.record(lhs == rhs, (space, J, K))


def _monotone(rng, res):
    space = _random_space(rng, uniform=True)
    A = _random_event(rng, space)
    B = A | _random_event(rng, space)
    J = _random_index_set(rng, space.dims)
    K = J | _random_index_set(rng, space.dims)
    ok = bkr.closure(A, J) <= bkr.closure(B, J) and bkr.closure(A, J) <= bkr.closure(A, K)
    res.record(ok, (space, J, K))


def _capcup(rng, res):
    space = _random_space(rng, uniform=True)
    events = [_random_event(rng, space) for _ in range(int(rng.integers(2, 4)))]
    J = _random_index_set(rng, space.dims)
    inter = events[0]
    union = events[0]
    for e in events[1:]:
        inter = inter & e
        union = union | e
    closed = [bkr.closure(e, J) for e in events]
    c_inter = closed[0]
    c_union = closed[0]
    for c in closed[1:]:
        c_inter = c_inter & c
        c_union = c_union | c
    ok = bkr.closure(inter, J) == c_inter and c_union <= bkr.closure(union, J)
    res.record(ok, (space, J))


def _box_in_nested(rng, res):
    space = _random_space(rng, uniform=True)
    events = [_random_event(rng, space) for _ in range(int(rng.integers(2, 4)))]
    res.record(bkr.bkr_box(events) <= bkr.left_nested_box(events), space)


def _random_bets(rng, b, d):
    return bkr.BetMatrix((rng.random((b, d)) < 0.6).astype(int))


def _draw_space(rng, b, d):
    # one symbol per draw: bit i set <=> bet i wins that draw
    joint = rng.dirichlet(np.full(2**b, 0.7))
    return bkr.FiniteEventSpace(2**b, d, [joint] * d), joint


def _win_sets(b):
    return [{s for s in range(2**b) if s >> i & 1} for i in range(b)]


def _contained(rng, res):
    b = int(rng.integers(2, 4))
    d = int(rng.integers(1, 5 if b == 2 else 4))
    space, _ = _draw_space(rng, b, d)
    B = _random_bets(rng, b, d)
    wins = [int(rng.integers(0, n + 1)) for n in B.row_sums]
    W, I = bkr.win_events_from_bets(space, B, _win_sets(b), wins)
    lhs = I
    for Wi in W:
        lhs = lhs & Wi
    res.record(lhs <= bkr.bkr_box(W), (B.entries.tolist(), wins))


def _ind_bkr(rng, res):
    space = _random_space(rng)
    events = [_random_event(rng, space) for _ in range(int(rng.integers(2, 4)))]
    lhs = bkr.event_prob(space, bkr.bkr_box(events))
    rhs = math.prod(bkr.event_prob(space, e) for e in events)
    res.record(lhs <= rhs + PROB_SLACK, (space, lhs, rhs))


def _prop_cond(rng, res):
    b = int(rng.integers(2, 4))
    d = int(rng.integers(1, 5 if b == 2 else 4))
    space, joint = _draw_space(rng, b, d)
    B = _random_bets(rng, b, d)
    wins = [int(rng.integers(0, n + 1)) for n in B.row_sums]
    win_sets = _win_sets(b)
    W, I = bkr.win_events_from_bets(space, B, win_sets, wins)
    both = I
    for Wi in W:
        both = both & Wi
    probs = [bkr.event_prob(space, Wi) for Wi in W]
    ok = bkr.event_prob(space, both) <= math.prod(probs) + PROB_SLACK
    for i, (n_i, w_i) in enumerate(zip(B.row_sums, wins)):
        p_i = float(sum(joint[s] for s in win_sets[i]))
        if not 0.0 < p_i < 1.0:
            continue
        expected = tail_prob((float(n_i), w_i, p_i))
        ok = ok and abs(probs[i] - expected) <= 1e-10 * max(expected, 1e-300)
    res.record(ok, (B.entries.tolist(), wins))


SUITES = {
    "cylinder-composition": _cylcomp,
    "closure-monotone": _monotone,
    "closure-cap-cup": _capcup,
    "box-in-left-nested": _box_in_nested,
    "no-dependent-wins-in-box": _contained,
    "box-probability-inequality": _ind_bkr,
    "independent-bound-end-to-end": _prop_cond,
}


def run_suites(seed=0, instances=500, names=None):
    """Run each named suite on ``instances`` random cases; returns {name: SuiteResult}."""
    out = {}
    for k, (name, fn) in enumerate(SUITES.items()):
        if names is not None and name not in names:
            continue
        rng = np.random.default_rng([seed, k])
        res = SuiteResult(name)
        for _ in range(instances):
            fn(rng, res)
        out[name] = res
    return out


def skip_example():
    """The three-coordinate binary example where the box is not associative."""
    space = bkr.FiniteEventSpace(2, 3)
    A = space.from_pattern((0, "*", "*")) | space.from_pattern((1, 0, "*"))
    B = space.from_pattern((0, "*", "*")) | space.from_pattern((1, 1, "*"))
    C = space.from_pattern(("*", 0, 1))
    return space, A, B, C


def check_skip_example():
    """Returns {description: (computed outcomes, expected outcomes)}."""
    space, A, B, C = skip_example()
    return {
        "A box B": (bkr.bkr_box([A, B]).outcomes(), space.from_pattern((0, "*", "*")).outcomes()),
        "(A box B) box C": (bkr.left_nested_box([A, B, C]).outcomes(), [(0, 0, 1)]),
        "B box C": (bkr.bkr_box([B, C]).outcomes(), [(0, 0, 1)]),
        "A box (B box C)": (bkr.bkr_box([A, bkr.bkr_box([B, C])]).outcomes(), []),
        "A box B box C": (bkr.bkr_box([A, B, C]).outcomes(), []),
    }
