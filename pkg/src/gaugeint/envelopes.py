"""Gage-window envelopes.

For a gage g, the sup-envelope of f at x is the supremum of f(t) over all
tags t that could legally own a piece containing x, i.e. |x - t| < g(t)
(windows are open up to measure zero, which integrals ignore).  The
integral of (sup-envelope - inf-envelope) dominates, for any g-fine
partition: the spread between two Riemann sums, the pointwise error sums,
tag-swap sums, and the per-interval oscillation sums.  For step functions
the envelopes are themselves step functions and everything is exact.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from fractions import Fraction
from typing import List, Optional, Tuple

from .functions import LatticeFunction, StepFunction
from .lattice import LatticeVector
from .partitions import Gage, Interval, TaggedPartition, cousin_items, item_is_fine
from .scalars import RATIONAL

ZERO = Fraction(0)
ONE = Fraction(1)


def _windows(gage: Gage, tag_lo: Fraction, tag_hi: Fraction) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """Per gage piece, the effective tag range [r, s] and radius."""
    out = []
    for i, (p, q) in enumerate(zip(gage.breakpoints, gage.breakpoints[1:])):
        r, s = max(p, tag_lo), min(q, tag_hi)
        if r < s:
            out.append((r, s, gage.values[i]))
    return out


def _step_range_extrema(f: StepFunction, alpha: Fraction, beta: Fraction) -> Optional[Tuple[LatticeVector, LatticeVector]]:
    """Componentwise (min, max) of f over the open interval (alpha, beta)."""
    if alpha >= beta:
        return None
    lo_vec = hi_vec = None
    i = max(0, bisect_right(f.bps, alpha) - 1)
    for k in range(i, len(f.values)):
        piece_lo, piece_hi = f.bps[k], f.bps[k + 1]
        if piece_lo >= beta:
            break
        if piece_hi <= alpha:
            continue
        # the piece [piece_lo, piece_hi) meets (alpha, beta): its value is
        # attained on a set of positive measure unless it only touches at
        # alpha; touching at a single point still yields a legal tag there
        v = f.values[k]
        lo_vec = v if lo_vec is None else lo_vec.meet(v)
        hi_vec = v if hi_vec is None else hi_vec.join(v)
    if lo_vec is None:
        return None
    return lo_vec, hi_vec


def step_envelope_cells(
    f: StepFunction,
    gage: Gage,
    lo: Fraction = ZERO,
    hi: Fraction = ONE,
    tag_lo: Fraction = ZERO,
    tag_hi: Fraction = ONE,
) -> List[Tuple[Fraction, Fraction, LatticeVector, LatticeVector]]:
    """Cells (u, v, env_inf, env_sup) with constant envelopes, exact.

    ``tag_lo``/``tag_hi`` restrict the admissible tags (used for the
    interval-local oscillation of Henstock subpartitions).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    wins = _windows(gage, Fraction(tag_lo), Fraction(tag_hi))
    cuts = {lo, hi}

    def clip(x: Fraction) -> None:
        if lo < x < hi:
            cuts.add(x)

    for r, s, g in wins:
        for x in (r - g, r + g, s - g, s + g):
            clip(x)
        for c in f.bps:
            if r - g <= c <= s + g:
                clip(c - g)
                clip(c + g)
                clip(c)
    for c in f.bps:
        clip(c)
    points = sorted(cuts)
    cells = []
    for u, v in zip(points, points[1:]):
        x = (u + v) / 2
        inf_vec = sup_vec = f.evaluate(x)  # t = x is always admissible
        for r, s, g in wins:
            t_lo, t_hi = max(r, x - g), min(s, x + g)
            got = _step_range_extrema(f, t_lo, t_hi)
            if got is not None:
                inf_vec = inf_vec.meet(got[0])
                sup_vec = sup_vec.join(got[1])
        cells.append((u, v, inf_vec, sup_vec))
    return cells


def step_envelope_gap_integral(
    f: StepFunction,
    gage: Gage,
    lo: Fraction = ZERO,
    hi: Fraction = ONE,
    tag_lo: Fraction = ZERO,
    tag_hi: Fraction = ONE,
) -> LatticeVector:
    """Exact integral of (sup-envelope - inf-envelope) over [lo, hi]."""
    total = LatticeVector.zeros(f.dim, f.backend)
    for u, v, inf_vec, sup_vec in step_envelope_cells(f, gage, lo, hi, tag_lo, tag_hi):
        total = total + (sup_vec - inf_vec).scale_length(v - u)
    return total


def monotone_envelope_gap_integral(
    f: LatticeFunction,
    radius: Fraction,
    lo: Fraction = ZERO,
    hi: Fraction = ONE,
    tag_lo: Fraction = ZERO,
    tag_hi: Fraction = ONE,
) -> LatticeVector:
    """Exact envelope-gap integral for a nondecreasing f under a constant
    gage: the sup-envelope is f(min(x + radius, tag_hi)) and the
    inf-envelope f(max(x - radius, tag_lo)); jumps only shift the picture
    on null sets.  Needs a closed-form integral for f."""
    lo, hi, c = Fraction(lo), Fraction(hi), Fraction(radius)
    tag_lo, tag_hi = Fraction(tag_lo), Fraction(tag_hi)
    if not f.is_monotone:
        raise ValueError("monotone envelope formula needs a nondecreasing function")

    def sup_part() -> LatticeVector:
        z = tag_hi - c  # right of z the envelope saturates at f(tag_hi)
        mid = min(hi, max(lo, z))
        out = LatticeVector.zeros(f.dim, f.backend)
        if mid > lo:
            out = out + f.exact_integral(lo + c, mid + c)
        if hi > mid:
            out = out + f.evaluate(tag_hi).scale_length(hi - mid)
        return out

    def inf_part() -> LatticeVector:
        z = tag_lo + c  # left of z the envelope saturates at f(tag_lo)
        mid = min(hi, max(lo, z))
        out = LatticeVector.zeros(f.dim, f.backend)
        if mid > lo:
            out = out + f.evaluate(tag_lo).scale_length(mid - lo)
        if hi > mid:
            out = out + f.exact_integral(mid - c, hi - c)
        return out

    return sup_part() - inf_part()


# ---------------------------------------------------------------------------
# extremal tags (adversarial constructions)
# ---------------------------------------------------------------------------


def _tag_quantum(iv: Interval) -> Fraction:
    return iv.length / 1024


def extremal_tag(
    f: LatticeFunction,
    gage: Gage,
    iv: Interval,
    component: int,
    direction: int,
    henstock: bool = False,
    fallback: Optional[Fraction] = None,
) -> Fraction:
    """A fine tag (free by default) pushing f_j as high (direction > 0) or
    low (direction < 0) as the gage windows allow.  Candidate-based with
    exact fineness validation; falls back to the interval's own points."""
    q = _tag_quantum(iv)
    cands = {iv.a, iv.midpoint()}
    if fallback is not None:
        cands.add(fallback)
    if iv.b <= ONE:
        cands.add(iv.b)
    reach = max(gage.values)
    lo_reach = max(ZERO, iv.a - reach)
    hi_reach = min(ONE, iv.b + reach)
    for i, (p, pq) in enumerate(zip(gage.breakpoints, gage.breakpoints[1:])):
        g = gage.values[i]
        # window extremes for this gage piece
        for x in (max(p, iv.b - g), min(pq - q, iv.a + g - q)):
            if lo_reach <= x <= hi_reach and ZERO <= x <= ONE:
                cands.add(x)
    for c in f.breakpoints():
        if lo_reach <= c <= hi_reach:
            for x in (c, c - q, c + q):
                if ZERO <= x <= ONE:
                    cands.add(x)
    best_tag, best_val = None, None
    for t in cands:
        if henstock and not iv.contains_tag(t):
            continue
        if not item_is_fine(gage, iv, t):
            continue
        val = f.evaluate(t).entries[component]
        if best_val is None or (val > best_val if direction > 0 else val < best_val):
            best_tag, best_val = t, val
    if best_tag is None:
        raise AssertionError(f"no fine tag found for [{iv.a},{iv.b})")
    return best_tag


def extremal_partition(
    f: LatticeFunction,
    gage: Gage,
    component: int,
    direction: int,
    henstock: bool = False,
    shrink: int = 8,
) -> TaggedPartition:
    """Fine partition whose Riemann sum approaches the envelope extreme in
    the given component.  Cells follow the envelope-constancy cuts for
    step integrands and are built against a gage shrunk by ``shrink``, so
    each cell is small relative to the true windows and an extremal tag
    can reach the envelope value with negligible deficit."""
    if isinstance(f, StepFunction):
        cuts = sorted({u for u, _, _, _ in step_envelope_cells(f, gage)} | {ONE})
    else:
        cuts = sorted({ZERO, ONE} | set(f.breakpoints()))
    fine_gage = Gage(gage.breakpoints, [v / shrink for v in gage.values])
    items = []
    for seg_a, seg_b in zip(cuts, cuts[1:]):
        for iv, t in cousin_items(fine_gage, Interval(seg_a, seg_b)):
            items.append(
                (iv, extremal_tag(f, gage, iv, component, direction, henstock, fallback=t))
            )
    kind = "henstock" if henstock else "mcshane"
    return TaggedPartition(items, kind=kind)


def binding_component(bound: LatticeVector, potential: LatticeVector) -> int:
    """Index where the achievable quantity uses the largest share of the
    bound (the component a negative control should attack)."""
    best_j, best_ratio = 0, None
    for j, (b, p) in enumerate(zip(bound.entries, potential.entries)):
        if b <= 0:
            continue
        ratio = float(p) / float(b)
        if best_ratio is None or ratio > best_ratio:
            best_j, best_ratio = j, ratio
    return best_j
