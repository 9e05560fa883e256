"""Gages and tagged interval partitions of [0,1].

All interval endpoints, tags, and gage data are exact rationals, so
fineness is decidable and partition measure sums to 1 exactly.

Interval convention: items are half-open [a,b), the last one closing at 1.
Fineness of an item (E=[a,b), tag t) under a gage g means

    t - a < g(t)   and   b - t <= g(t),

which realizes the open-ball condition "every point of E lies within
g(t) of t" for half-open intervals: equality is permitted only at the
open right end.  The same formula is valid for tags outside E (free /
McShane tagging), where one of the two constraints is vacuous.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatchError
from .scalars import RATIONAL, format_scalar, parse_scalar

ZERO = Fraction(0)
ONE = Fraction(1)

#: Denominator grid for seeded-random rational draws (keeps Fractions small).
_RAND_DENOM = 2**16


def _rand_fraction(rng: random.Random) -> Fraction:
    """Uniform rational in (0, 1) on a fixed dyadic grid."""
    return Fraction(rng.randrange(1, _RAND_DENOM), _RAND_DENOM)


@dataclass(frozen=True, order=True)
class Interval:
    """Subinterval [a,b) of [0,1] with rational endpoints, 0 <= a < b <= 1."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (ZERO <= a < b <= ONE):
            raise ValueError(f"bad interval [{a}, {b})")

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    def midpoint(self) -> Fraction:
        return (self.a + self.b) / 2

    def contains_tag(self, t: Fraction) -> bool:
        """Tag admissibility for Henstock discipline: t in closure [a,b]."""
        return self.a <= t <= self.b

    def to_json(self) -> dict:
        return {"a": format_scalar(self.a), "b": format_scalar(self.b)}

    @staticmethod
    def from_json(d: dict) -> "Interval":
        return Interval(parse_scalar(d["a"]), parse_scalar(d["b"]))


class Gage:
    """Piecewise-constant positive radius function on [0,1].

    Pieces are [x_i, x_{i+1}) on the sorted breakpoints, the last piece
    closed at 1.  The global minimum is positive, which makes the Cousin
    construction terminate.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints: Sequence, values: Sequence):
        bps = tuple(Fraction(x) for x in breakpoints)
        vals = tuple(Fraction(v) for v in values)
        if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(x >= y for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise ValueError("need one value per piece")
        if any(v <= 0 for v in vals):
            raise ValueError("gage values must be strictly positive")
        self.breakpoints = bps
        self.values = vals

    @staticmethod
    def constant(value) -> "Gage":
        return Gage((ZERO, ONE), (value,))

    def __call__(self, t: Fraction) -> Fraction:
        if not (ZERO <= t <= ONE):
            raise ValueError(f"gage argument {t} outside [0,1]")
        i = bisect_right(self.breakpoints, t) - 1
        if i >= len(self.values):  # t == 1
            i = len(self.values) - 1
        return self.values[i]

    @property
    def delta_min(self) -> Fraction:
        return min(self.values)

    def interior_breakpoints(self) -> tuple:
        return self.breakpoints[1:-1]

    def with_min_overlay(self, zones: Iterable[tuple]) -> "Gage":
        """New gage whose value on each zone (lo, hi, v) is min(old, v)."""
        points = set(self.breakpoints)
        zones = [(Fraction(lo), Fraction(hi), Fraction(v)) for lo, hi, v in zones]
        for lo, hi, _ in zones:
            points.add(max(ZERO, lo))
            points.add(min(ONE, hi))
        bps = sorted(points)
        vals = []
        for x, y in zip(bps, bps[1:]):
            mid = (x + y) / 2
            v = self(mid)
            for lo, hi, zv in zones:
                if lo <= mid < hi:
                    v = min(v, zv)
            vals.append(v)
        return Gage(bps, vals)

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_scalar(x) for x in self.breakpoints],
            "values": [format_scalar(v) for v in self.values],
        }

    @staticmethod
    def from_json(d: dict) -> "Gage":
        return Gage(
            [parse_scalar(s) for s in d["breakpoints"]],
            [parse_scalar(s) for s in d["values"]],
        )

    def __repr__(self):
        return f"Gage({len(self.values)} pieces, min {self.delta_min})"


HENSTOCK = "henstock"
MCSHANE = "mcshane"

MIDPOINT = "midpoint"
LEFT = "left"
RIGHT = "right"
RANDOM = "random"
INHERITED = "inherited"


class TaggedPartition:
    """Finite family of disjoint tagged intervals covering [0,1]."""

    __slots__ = ("items", "kind")

    def __init__(self, items: Iterable[tuple], kind: str = HENSTOCK):
        if kind not in (HENSTOCK, MCSHANE):
            raise ValueError(f"unknown partition kind {kind!r}")
        pairs = sorted(
            ((iv if isinstance(iv, Interval) else Interval(*iv), Fraction(t)) for iv, t in items),
            key=lambda p: p[0].a,
        )
        if not pairs:
            raise ValueError("empty partition")
        if pairs[0][0].a != ZERO or pairs[-1][0].b != ONE:
            raise ValueError("partition must cover [0,1]")
        for (left, _), (right, _) in zip(pairs, pairs[1:]):
            if left.b != right.a:
                raise ValueError(f"gap or overlap at {left.b} vs {right.a}")
        for iv, t in pairs:
            if not (ZERO <= t <= ONE):
                raise ValueError(f"tag {t} outside [0,1]")
            if kind == HENSTOCK and not iv.contains_tag(t):
                raise ValueError(f"Henstock tag {t} outside closure of [{iv.a},{iv.b})")
        self.items = tuple(pairs)
        self.kind = kind

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def intervals(self) -> tuple:
        return tuple(iv for iv, _ in self.items)

    def total_length(self) -> Fraction:
        return sum((iv.length for iv, _ in self.items), start=ZERO)

    def retagged(self, tags: Sequence[Fraction], kind: Optional[str] = None) -> "TaggedPartition":
        if len(tags) != len(self.items):
            raise ValueError("need one tag per interval")
        return TaggedPartition(
            [(iv, t) for (iv, _), t in zip(self.items, tags)],
            kind=kind or self.kind,
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "items": [
                {"a": format_scalar(iv.a), "b": format_scalar(iv.b), "tag": format_scalar(t)}
                for iv, t in self.items
            ],
        }

    @staticmethod
    def from_json(d: dict) -> "TaggedPartition":
        return TaggedPartition(
            [
                (Interval(parse_scalar(it["a"]), parse_scalar(it["b"])), parse_scalar(it["tag"]))
                for it in d["items"]
            ],
            kind=d["kind"],
        )

    def __repr__(self):
        return f"TaggedPartition({len(self.items)} intervals, {self.kind})"


def item_is_fine(gage: Gage, iv: Interval, t: Fraction) -> bool:
    g = gage(t)
    return (t - iv.a < g) and (iv.b - t <= g)


def is_fine(gage: Gage, pi: TaggedPartition) -> bool:
    """Whether every item satisfies the gage-fineness condition."""
    return all(item_is_fine(gage, iv, t) for iv, t in pi.items)


def _tag_candidates(iv: Interval, gage: Gage, tag_policy: str, rng: Optional[random.Random]):
    """Candidate tags inside the closure of iv, ordered by policy."""
    mid = iv.midpoint()
    cands = [mid, iv.a, iv.b]
    # a tag from the gage piece with the largest radius overlapping iv
    best = None
    for i, (x, y) in enumerate(zip(gage.breakpoints, gage.breakpoints[1:])):
        lo, hi = max(x, iv.a), min(y, iv.b)
        if lo < hi and (best is None or gage.values[i] > best[0]):
            best = (gage.values[i], (lo + hi) / 2)
    if best is not None:
        cands.append(best[1])
    if tag_policy == LEFT:
        cands.insert(0, iv.a)
    elif tag_policy == RIGHT:
        cands.insert(0, iv.b)
    elif tag_policy == RANDOM:
        if rng is None:
            raise ValueError("random tag policy requires an rng")
        cands.insert(0, iv.a + iv.length * _rand_fraction(rng))
        rng.shuffle(cands)
    return cands


def cousin_items(
    gage: Gage,
    segment: Interval,
    tag_policy: str = MIDPOINT,
    rng: Optional[random.Random] = None,
) -> list:
    """Fine tagged items covering ``segment`` (Cousin construction).

    Work-stack bisection: try candidate tags for the current interval;
    if none makes it fine, split at the interior gage breakpoint nearest
    the midpoint (at the midpoint when no interior breakpoint exists).
    Terminates because the gage has a positive global minimum.
    """
    stack = [segment]
    items = []
    while stack:
        iv = stack.pop()
        placed = False
        for t in _tag_candidates(iv, gage, tag_policy, rng):
            if ZERO <= t <= ONE and iv.contains_tag(t) and item_is_fine(gage, iv, t):
                items.append((iv, t))
                placed = True
                break
        if placed:
            continue
        mid = iv.midpoint()
        split = mid
        interior = [c for c in gage.interior_breakpoints() if iv.a < c < iv.b]
        if interior:
            split = min(interior, key=lambda c: abs(c - mid))
        if not (iv.a < split < iv.b):
            split = mid
        stack.append(Interval(iv.a, split))
        stack.append(Interval(split, iv.b))
    return items


def cousin_partition(
    gage: Gage,
    tag_policy: str = MIDPOINT,
    rng: Optional[random.Random] = None,
) -> TaggedPartition:
    """Constructive Cousin partition: a Henstock partition fine for ``gage``."""
    return TaggedPartition(cousin_items(gage, Interval(ZERO, ONE), tag_policy, rng), kind=HENSTOCK)


def _policy_tag(iv: Interval, policy: str, rng: Optional[random.Random], inherited: Optional[Fraction]) -> Fraction:
    if policy == INHERITED and inherited is not None and iv.contains_tag(inherited):
        return inherited
    if policy == LEFT:
        return iv.a
    if policy == RIGHT:
        return iv.b
    if policy == RANDOM:
        if rng is None:
            raise ValueError("random tag policy requires an rng")
        return iv.a + iv.length * _rand_fraction(rng)
    return iv.midpoint()


def refine(
    pi: TaggedPartition,
    k: int,
    tag_policy: str = INHERITED,
    rng: Optional[random.Random] = None,
) -> TaggedPartition:
    """Split every interval into k equal parts; tags assigned by policy.

    With the inherited policy the sub-interval whose closure contains the
    parent tag keeps it; the others fall back to midpoints.
    """
    if k < 1:
        raise ValueError(f"refinement factor must be >= 1, got {k}")
    items = []
    for iv, t in pi.items:
        step = iv.length / k
        for j in range(k):
            sub = Interval(iv.a + j * step, iv.a + (j + 1) * step)
            items.append((sub, _policy_tag(sub, tag_policy, rng, inherited=t)))
    return TaggedPartition(items, kind=pi.kind)


def common_refinement(
    p1: TaggedPartition,
    p2: TaggedPartition,
    tag_policy: str = MIDPOINT,
    rng: Optional[random.Random] = None,
) -> TaggedPartition:
    """Partition whose intervals are the nonempty intersections E_i n F_j."""
    cuts = sorted({iv.a for iv in p1.intervals()} | {iv.b for iv in p1.intervals()}
                  | {iv.a for iv in p2.intervals()} | {iv.b for iv in p2.intervals()})
    items = []
    for x, y in zip(cuts, cuts[1:]):
        sub = Interval(x, y)
        items.append((sub, _policy_tag(sub, tag_policy, rng, inherited=None)))
    kind = HENSTOCK if p1.kind == p2.kind == HENSTOCK else MCSHANE
    return TaggedPartition(items, kind=kind)


def riemann_sum(f, pi: TaggedPartition):
    """sigma(f, pi) = sum of f(t_i) * length(E_i).

    Interval lengths are exact rationals; they are converted to the
    integrand's scalar backend before multiplying.
    """
    total = None
    for iv, t in pi.items:
        term = f.evaluate(t).scale_length(iv.length)
        total = term if total is None else total + term
    if total is None:
        raise ValueError("empty partition")
    return total


def _random_tag_for(iv: Interval, gage: Gage, rng: random.Random, kind: str,
                    fallback: Optional[Fraction]) -> Optional[Fraction]:
    """A random fine tag for iv, or the fallback (verified), or None."""
    for _ in range(8):
        if kind == HENSTOCK:
            cand = iv.a + iv.length * _rand_fraction(rng)
        else:
            # free tags live roughly in the window [b - g, a + g)
            g = gage(iv.midpoint())
            lo, hi = max(ZERO, iv.b - g), min(ONE, iv.a + g)
            cand = lo + (hi - lo) * _rand_fraction(rng) if hi > lo else iv.a
        if item_is_fine(gage, iv, cand) and (kind == MCSHANE or iv.contains_tag(cand)):
            return cand
    for cand in (iv.a, iv.midpoint(), fallback):
        if cand is None:
            continue
        ok_tag = kind == MCSHANE or iv.contains_tag(cand)
        if ok_tag and item_is_fine(gage, iv, cand):
            return cand
    return None


def random_fine_partition(
    gage: Gage,
    rng: random.Random,
    kind: str = HENSTOCK,
    style: str = "walk",
) -> TaggedPartition:
    """Seeded-random gage-fine partition.

    ``walk`` sweeps left to right with randomized widths (each bounded by
    the gage at its left endpoint, so the left tag is always fine) and then
    retags randomly; ``cousin`` starts from the deterministic Cousin
    partition and randomly splits and retags its items where that keeps
    fineness.  Fineness is re-verified before returning.
    """
    items = []
    if style == "cousin":
        for iv, t in cousin_items(gage, Interval(ZERO, ONE), MIDPOINT):
            k = rng.choice((1, 2, 2, 3))
            step = iv.length / k
            subs = [Interval(iv.a + j * step, iv.a + (j + 1) * step) for j in range(k)]
            tagged = []
            for sub in subs:
                # the parent tag keeps every sub-interval fine; Henstock
                # validity restricts it to the sub containing it
                fb = t if (kind == MCSHANE or sub.contains_tag(t)) else None
                tag = _random_tag_for(sub, gage, rng, kind, fallback=fb)
                if tag is None:
                    tagged = None
                    break
                tagged.append((sub, tag))
            items.extend(tagged if tagged is not None else [(iv, t)])
    else:
        x = ZERO
        while x < ONE:
            width = gage(x) * _rand_fraction(rng)
            y = x + width
            if y > ONE:
                y = ONE
            iv = Interval(x, y)
            tag = _random_tag_for(iv, gage, rng, kind, fallback=iv.a)
            items.append((iv, tag if tag is not None else iv.a))
            x = y
    pi = TaggedPartition(items, kind=kind)
    if not is_fine(gage, pi):
        raise AssertionError("random partition generator produced an unfine partition")
    return pi
