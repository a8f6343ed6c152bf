"""Events on a finite product space S^d, cylinder closures and the BKR box.

Events are boolean arrays of shape ``(|S|,) * d`` (one axis per draw), so a
cylinder closure is an ``all`` over the free axes and every operation is an
exact set computation.  Coordinates are numbered from 0.

    closure(A, J)   = {w in A : every w' agreeing with w on J is in A}
    box(A_1..A_b)   = union over pairwise disjoint J_1..J_b of
                      closure(A_1, J_1) & ... & closure(A_b, J_b)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

__all__ = [
    "MAX_OUTCOMES",
    "FiniteEventSpace",
    "Event",
    "BetMatrix",
    "cylinder",
    "closure",
    "bkr_box",
    "left_nested_box",
    "event_prob",
    "win_events_from_bets",
]

MAX_OUTCOMES = 10**7


class FiniteEventSpace:
    """S^d with S = {0, ..., alphabet_size - 1} and an independent product measure.

    ``coord_dists`` holds one probability vector over S per coordinate;
    uniform when omitted.
    """

    def __init__(self, alphabet_size, dims, coord_dists=None):
        if alphabet_size < 1 or dims < 1:
            raise ValueError("need alphabet_size >= 1 and dims >= 1")
        if alphabet_size**dims > MAX_OUTCOMES:
            raise ValueError(
                f"|S|^d = {alphabet_size}^{dims} exceeds the enumeration guard {MAX_OUTCOMES}"
            )
        self.alphabet_size = alphabet_size
        self.dims = dims
        if coord_dists is None:
            coord_dists = [np.full(alphabet_size, 1.0 / alphabet_size)] * dims
        dists = [np.asarray(q, dtype=float) for q in coord_dists]
        if len(dists) != dims:
            raise ValueError(f"expected {dims} coordinate distributions, got {len(dists)}")
        for j, q in enumerate(dists):
            if q.shape != (alphabet_size,) or (q < 0).any() or abs(q.sum() - 1.0) > 1e-12:
                raise ValueError(f"coordinate {j} is not a probability vector over S")
        self.coord_dists = tuple(dists)

    @property
    def shape(self):
        return (self.alphabet_size,) * self.dims

    @cached_property
    def measure(self):
        return reduce(np.multiply.outer, self.coord_dists)

    def event(self, mask):
        return Event(self, mask)

    def full(self):
        return Event(self, np.ones(self.shape, dtype=bool))

    def empty(self):
        return Event(self, np.zeros(self.shape, dtype=bool))

    def from_outcomes(self, outcomes):
        mask = np.zeros(self.shape, dtype=bool)
        for omega in outcomes:
            mask[self._check_outcome(omega)] = True
        return Event(self, mask)

    def from_predicate(self, pred):
        mask = np.zeros(self.shape, dtype=bool)
        for omega in itertools.product(range(self.alphabet_size), repeat=self.dims):
            mask[omega] = bool(pred(omega))
        return Event(self, mask)

    def from_pattern(self, pattern):
        """Event from a pattern such as ``(0, '*', '*')``; '*' or None is free."""
        if len(pattern) != self.dims:
            raise ValueError("pattern length must equal dims")
        index = tuple(slice(None) if s in ("*", None) else s for s in pattern)
        mask = np.zeros(self.shape, dtype=bool)
        mask[index] = True
        return Event(self, mask)

    def _check_outcome(self, omega):
        omega = tuple(int(s) for s in omega)
        if len(omega) != self.dims or not all(0 <= s < self.alphabet_size for s in omega):
            raise ValueError(f"{omega!r} is not an outcome of S^{self.dims}")
        return omega

    def __repr__(self):
        return f"FiniteEventSpace(alphabet_size={self.alphabet_size}, dims={self.dims})"


class Event:
    """Immutable subset of a FiniteEventSpace."""

    __slots__ = ("space", "mask")

    def __init__(self, space, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != space.shape:
            raise ValueError(f"mask shape {mask.shape} does not match space {space.shape}")
        mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("events are immutable")

    def _same_space(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        if other.space is not self.space and other.space.shape != self.space.shape:
            raise ValueError("events live in different spaces")
        return True

    def __and__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.mask & other.mask)

    def __or__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.mask | other.mask)

    def __invert__(self):
        return Event(self.space, ~self.mask)

    def __le__(self, other):
        self._same_space(other)
        return bool(not (self.mask & ~other.mask).any())

    def __ge__(self, other):
        return other <= self

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.space.shape == other.space.shape and bool(np.array_equal(self.mask, other.mask))

    __hash__ = None

    def __len__(self):
        return int(self.mask.sum())

    def __contains__(self, omega):
        return bool(self.mask[tuple(omega)])

    def __iter__(self):
        return iter(self.outcomes())

    def outcomes(self):
        return [tuple(int(s) for s in idx) for idx in np.argwhere(self.mask)]

    def __repr__(self):
        items = self.outcomes()
        if len(items) > 8:
            return f"Event({len(items)} outcomes)"
        return f"Event({items})"


def _check_index_set(space, J):
    J = frozenset(int(j) for j in J)
    bad = [j for j in J if not 0 <= j < space.dims]
    if bad:
        raise ValueError(f"coordinate indices {sorted(bad)} out of range 0..{space.dims - 1}")
    return J


def cylinder(space, J, omega):
    """Outcomes agreeing with ``omega`` on the coordinates in ``J``."""
    J = _check_index_set(space, J)
    omega = space._check_outcome(omega)
    index = tuple(omega[j] if j in J else slice(None) for j in range(space.dims))
    mask = np.zeros(space.shape, dtype=bool)
    mask[index] = True
    return Event(space, mask)


def _closure_mask(mask, J, dims):
    free = tuple(j for j in range(dims) if j not in J)
    if not free:
        return mask
    return np.broadcast_to(mask.all(axis=free, keepdims=True), mask.shape)


def closure(A, J):
    """[A]_J: outcomes of A certified by looking only at coordinates in J."""
    J = _check_index_set(A.space, J)
    return Event(A.space, _closure_mask(A.mask, J, A.space.dims))


def bkr_box(events):
    """Outcomes where all events occur with pairwise disjoint certifying coordinate sets.

    Enumerates assignments of each coordinate to one event.  Leaving a
    coordinate unassigned never helps, since closures grow with J.
    """
    events = list(events)
    if len(events) < 2:
        raise ValueError("the box operation needs at least two events")
    space = events[0].space
    for e in events[1:]:
        if e.space.shape != space.shape:
            raise ValueError("dimension mismatch between events")
    d = space.dims
    b = len(events)
    cache = [dict() for _ in range(b)]

    def closed(i, J):
        got = cache[i].get(J)
        if got is None:
            got = _closure_mask(events[i].mask, J, d)
            cache[i][J] = got
        return got

    result = np.zeros(space.shape, dtype=bool)
    for assignment in itertools.product(range(b), repeat=d):
        parts = [frozenset(j for j in range(d) if assignment[j] == i) for i in range(b)]
        acc = closed(0, parts[0])
        for i in range(1, b):
            acc = acc & closed(i, parts[i])
            if not acc.any():
                break
        result |= acc
    return Event(space, result)


def left_nested_box(events):
    """(((A_1 box A_2) box A_3) ... box A_b)."""
    events = list(events)
    if len(events) < 2:
        raise ValueError("the box operation needs at least two events")
    return reduce(lambda acc, e: bkr_box([acc, e]), events[1:], events[0])


def event_prob(space, A):
    """Product-measure probability of ``A``."""
    return float(space.measure[A.mask].sum())


@dataclass(frozen=True)
class BetMatrix:
    """b x d zero-one matrix: entry (i, j) is 1 when bet i is placed on draw j."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2:
            raise ValueError("bet matrix must be two-dimensional")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("bet matrix entries must be 0 or 1")
        m = m.astype(np.int8)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def bets(self):
        return self.entries.shape[0]

    @property
    def draws(self):
        return self.entries.shape[1]

    @property
    def row_sums(self):
        return self.entries.sum(axis=1)


def win_events_from_bets(space, bets, win_sets, wins):
    """Events W_i (bet i wins at least wins[i] times) and I (no draw wins two bets).

    ``win_sets[i]`` is the set of draw symbols in S on which bet i wins.
    Returns ``(W, I)`` with ``W`` a list of Events.
    """
    B = bets.entries if isinstance(bets, BetMatrix) else BetMatrix(bets).entries
    b, d = B.shape
    if d != space.dims:
        raise ValueError(f"bet matrix has {d} draws but the space has {space.dims} coordinates")
    if len(win_sets) != b or len(wins) != b:
        raise ValueError("need one win set and one win count per bet")
    symbols = np.arange(space.alphabet_size)
    grids = np.indices(space.shape)
    # hits[i, j]: mask over S^d of "bet i placed on draw j and won there"
    hits = np.zeros((b, d) + space.shape, dtype=np.int32)
    for i in range(b):
        winning = np.isin(symbols, sorted(win_sets[i]))
        for j in range(d):
            if B[i, j]:
                hits[i, j] = winning[grids[j]]
    W = [Event(space, hits[i].sum(axis=0) >= wins[i]) for i in range(b)]
    I = Event(space, (hits.sum(axis=0) <= 1).all(axis=0))
    return W, I
