"""Per-class gage schedules with provable error bounds.

Every supported integrand class gets, for each index n, a gage and a
certified bound that dominates all four partition-sum quantities the
checks measure (Riemann-sum spread, pointwise error sums, tag-swap sums,
per-interval oscillation sums):

* step functions: a ladder gage that halves toward each jump point, with
  radius w/2 inside the inner zones of width 2w.  Tags outside the zones
  can never own an interval that meets a jump, so the envelope gap is
  supported on the zones and integrates to at most w * (total jump).
* bounded-variation functions (monotone or piecewise smooth): a constant
  gage c with certified bound 2 c * variation, by the sliding-window
  oscillation argument.
* finite a.e. modifications: the base schedule shrunk to radius
  1/(2 n |N|) around each exceptional point, widening the bound by 2M/n
  for a majorant M.

The schedule maximizes the gage subject to its bound, so the certified
value matches the asserted bound in the binding component; this is what
makes the halved negative-control bound reliably falsifiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .envelopes import (
    monotone_envelope_gap_integral,
    step_envelope_gap_integral,
)
from .errors import UnsupportedClassError
from .functions import AeModifiedFunction, LatticeFunction, StepFunction
from .lattice import LatticeVector, OSequence
from .partitions import Gage, Interval
from .scalars import FLOAT, RATIONAL

ZERO = Fraction(0)
ONE = Fraction(1)


def _down_round(x, grid: int = 2**24) -> Fraction:
    """Largest grid rational <= x (safe direction for gage radii)."""
    fx = Fraction(x) if not isinstance(x, float) else Fraction(x)
    scaled = (fx.numerator * grid) // fx.denominator
    return Fraction(scaled, grid)


def ladder_gage(breaks: Tuple[Fraction, ...], w: Fraction) -> Gage:
    """Piecewise-constant gage: radius w/2 on [c-w, c+w) around each jump
    point c, and half the distance to the nearest jump elsewhere, with
    dyadically spaced rungs so the piece count stays logarithmic in 1/w."""
    if not breaks:
        return Gage.constant(Fraction(1, 4))
    cuts = {ZERO, ONE}
    for c in breaks:
        radius = w
        while True:
            for x in (c - radius, c + radius):
                if ZERO < x < ONE:
                    cuts.add(x)
            if radius > 1:
                break
            radius *= 2
    points = sorted(cuts)
    values = []
    for u, v in zip(points, points[1:]):
        inner = any(c - w <= u and v <= c + w for c in breaks)
        if inner:
            values.append(w / 2)
        else:
            dist = min(max(u - c, c - v) for c in breaks)
            values.append(max(dist, w) / 2)
    return Gage(points, values)


class Schedule:
    """Gage schedule for one integrand under one o-sequence."""

    kind: str = "abstract"

    def __init__(self, f: LatticeFunction, oseq: OSequence):
        if oseq.c.dim != f.dim:
            raise ValueError("o-sequence dimension must match the integrand")
        self.f = f
        self.oseq = oseq
        self._gages: Dict[int, Gage] = {}

    def gage(self, n: int) -> Gage:
        got = self._gages.get(n)
        if got is None:
            got = self._build_gage(n)
            self._gages[n] = got
        return got

    def _build_gage(self, n: int) -> Gage:
        raise NotImplementedError

    def asserted_bound(self, n: int) -> LatticeVector:
        """The bound the theorems are checked against: b_n."""
        b = self.oseq(n)
        return b.to_float() if self.f.backend == FLOAT and b.backend == RATIONAL else b

    def certified_bound(self, n: int) -> LatticeVector:
        """Provable bound for the schedule's gage; at most the asserted."""
        raise NotImplementedError

    def ob_exact(self, n: int, iv: Interval) -> Optional[LatticeVector]:
        """Exact interval-local oscillation sup, where computable."""
        return None


class StepSchedule(Schedule):
    kind = "step"

    def __init__(self, f: StepFunction, oseq: OSequence):
        super().__init__(f, oseq)
        self.jumps = f.jumps()
        self.sum_jumps = LatticeVector.zeros(f.dim, f.backend)
        for _, j in self.jumps:
            self.sum_jumps = self.sum_jumps + j
        self.min_gap = f.min_gap()

    def width(self, n: int) -> Fraction:
        b = self.oseq(n)
        w = self.min_gap / 4
        for bj, sj in zip(b.entries, self.sum_jumps.entries):
            if sj > 0:
                w = min(w, _down_round(Fraction(bj) / Fraction(sj)))
        return w

    def _build_gage(self, n: int) -> Gage:
        breaks = self.f.breakpoints()
        if not breaks or self.sum_jumps.is_zero():
            return Gage.constant(Fraction(1, 4))
        return ladder_gage(breaks, self.width(n))

    def certified_bound(self, n: int) -> LatticeVector:
        return step_envelope_gap_integral(self.f, self.gage(n))

    def ob_exact(self, n: int, iv: Interval) -> LatticeVector:
        return step_envelope_gap_integral(self.f, self.gage(n), iv.a, iv.b, iv.a, iv.b)


class BVSchedule(Schedule):
    kind = "bv"

    def __init__(self, f: LatticeFunction, oseq: OSequence):
        super().__init__(f, oseq)
        self.variation = f.total_variation()

    def radius(self, n: int) -> Fraction:
        b = self.oseq(n)
        c = Fraction(1, 4)
        for bj, vj in zip(b.entries, self.variation.entries):
            if vj > 0:
                if isinstance(bj, float) or isinstance(vj, float):
                    c = min(c, _down_round(float(bj) / (2.0 * float(vj))))
                else:
                    c = min(c, _down_round(bj / (2 * vj)))
        if c <= 0:
            raise ValueError(f"o-sequence too small at n={n} for a usable gage")
        return c

    def _build_gage(self, n: int) -> Gage:
        return Gage.constant(self.radius(n))

    def certified_bound(self, n: int) -> LatticeVector:
        c = self.radius(n)
        if self.f.is_monotone and self.f.supports_exact_integral:
            return monotone_envelope_gap_integral(self.f, c)
        scale = 2 * c if self.variation.backend == RATIONAL else float(2 * c)
        return self.variation.scale(scale)

    def ob_exact(self, n: int, iv: Interval) -> Optional[LatticeVector]:
        if self.f.is_monotone and self.f.supports_exact_integral:
            return monotone_envelope_gap_integral(
                self.f, self.radius(n), iv.a, iv.b, iv.a, iv.b
            )
        return None


class AeSchedule(Schedule):
    kind = "ae"

    def __init__(self, f: AeModifiedFunction, oseq: OSequence):
        super().__init__(f, oseq)
        self.base_schedule = schedule_for(f.base, oseq)
        self.majorant = f.bound_abs()

    def zone_radius(self, n: int) -> Fraction:
        return Fraction(1, 2 * n * max(1, len(self.f.exceptions)))

    def _build_gage(self, n: int) -> Gage:
        r = self.zone_radius(n)
        zones = [(max(ZERO, u - r), min(ONE, u + r), r) for u, _ in self.f.exceptions]
        return self.base_schedule.gage(n).with_min_overlay(zones)

    def asserted_bound(self, n: int) -> LatticeVector:
        base = self.base_schedule.asserted_bound(n)
        widen = self.majorant.scale(
            Fraction(2, n) if self.majorant.backend == RATIONAL else 2.0 / n
        )
        if base.backend != widen.backend:
            base = base.to_float()
            widen = widen.to_float()
        return base + widen

    def certified_bound(self, n: int) -> LatticeVector:
        """Base certificate plus the exceptional-pileup supremum.

        Intervals tagged at an exceptional point u have total width at
        most 2 r(n), so the pileup in component j is a sum of
        (g - f)_j(u) weighted by widths in [0, 2r]: its largest absolute
        value is the bigger one-sided sum, scaled by 2r."""
        base = self.base_schedule.certified_bound(n)
        diffs = [v - self.f.base.evaluate(u) for u, v in self.f.exceptions]
        zero = Fraction(0) if self.f.backend == RATIONAL else 0.0
        entries = []
        for j in range(self.f.dim):
            pos = sum((d.entries[j] for d in diffs if d.entries[j] > 0), start=zero)
            neg = sum((-d.entries[j] for d in diffs if d.entries[j] < 0), start=zero)
            entries.append(max(pos, neg))
        spike = LatticeVector(entries)
        two_r = 2 * self.zone_radius(n)
        widen = spike.scale(two_r if spike.backend == RATIONAL else float(two_r))
        if base.backend != widen.backend:
            base = base.to_float()
            widen = widen.to_float()
        return base + widen


def schedule_for(f: LatticeFunction, oseq: OSequence) -> Schedule:
    """Constructive gage schedule for the supported classes."""
    if isinstance(f, AeModifiedFunction):
        return AeSchedule(f, oseq)
    if isinstance(f, StepFunction):
        return StepSchedule(f, oseq)
    try:
        f.total_variation()
    except Exception as exc:
        raise UnsupportedClassError(
            f"{f.name}: no gage schedule (need a step, bounded-variation, "
            f"or finite-modification form)"
        ) from exc
    return BVSchedule(f, oseq)
