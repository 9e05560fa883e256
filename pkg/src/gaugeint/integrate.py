"""Integral computation with certificates.

Step functions integrate exactly; componentwise-nondecreasing functions
get two-sided step brackets; smooth functions get adaptive dyadic
refinement with a Cauchy-gap certificate and a seeded-random fine
cross-check.  Order-type integration couples the partition count to an
o-sequence so the certified bound is the sequence value itself.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    MonotonicityError,
    NoConvergenceError,
    UnsupportedClassError,
)
from .functions import AeModifiedFunction, LatticeFunction, StepFunction
from .lattice import LatticeVector, OSequence, Space
from .partitions import Gage, Interval, TaggedPartition, random_fine_partition, riemann_sum
from .scalars import FLOAT, RATIONAL, Scalar, as_scalar, ceil_div, format_scalar

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Exact:
    def to_json(self) -> dict:
        return {"kind": "exact"}


@dataclass(frozen=True)
class Bracket:
    lower: LatticeVector
    upper: LatticeVector

    def __post_init__(self):
        if not self.lower.le(self.upper):
            raise ValueError("bracket lower bound exceeds upper bound")

    @property
    def width(self) -> LatticeVector:
        return self.upper - self.lower

    def to_json(self) -> dict:
        return {"kind": "bracket", "lower": self.lower.to_json(), "upper": self.upper.to_json()}


@dataclass(frozen=True)
class CauchyGap:
    gap: LatticeVector
    level: int

    def to_json(self) -> dict:
        return {"kind": "cauchy_gap", "gap": self.gap.to_json(), "level": self.level}


Certificate = Union[Exact, Bracket, CauchyGap]


@dataclass(frozen=True)
class IntegralResult:
    value: LatticeVector
    certificate: Certificate
    partitions_used: int
    backend: str

    def __post_init__(self):
        if isinstance(self.certificate, Bracket):
            if not (self.certificate.lower.le(self.value) and self.value.le(self.certificate.upper)):
                raise ValueError("value escapes its bracket")

    def half_gap(self) -> LatticeVector:
        """Certified bound on |value - true integral|."""
        if isinstance(self.certificate, Exact):
            return LatticeVector.zeros(self.value.dim, self.value.backend)
        if isinstance(self.certificate, Bracket):
            w = self.certificate.width
            half = Fraction(1, 2) if w.backend == RATIONAL else 0.5
            return w.scale(half)
        return self.certificate.gap

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "certificate": self.certificate.to_json(),
            "partitions_used": self.partitions_used,
            "backend": self.backend,
        }


def integrate_step(f: StepFunction) -> IntegralResult:
    """Exact integral of a step function: sum of value * piece length."""
    if not getattr(f, "is_step", False):
        raise UnsupportedClassError(f"{f.name}: integrate_step needs a step function")
    return IntegralResult(
        value=f.exact_integral(ZERO, ONE),
        certificate=Exact(),
        partitions_used=len(f.values),
        backend=f.backend,
    )


def integrate_monotone(f: LatticeFunction, n: int) -> IntegralResult:
    """Two-sided step bracket for a componentwise nondecreasing function.

    L sums f(i/n), U sums f((i+1)/n) on the uniform n-grid, so
    U - L = (f(1) - f(0))/n componentwise.  The reported value is the
    bracket midpoint, halving the certified error.
    """
    if n < 1:
        raise ValueError(f"bracket resolution must be >= 1, got {n}")
    grid = [f.evaluate(Fraction(i, n)) for i in range(n + 1)]
    for i in range(n):
        if not grid[i].le(grid[i + 1]):
            raise MonotonicityError(
                f"{f.name}: grid value at {i}/{n} exceeds the one at {i+1}/{n}"
            )
    length = Fraction(1, n)
    lower = upper = None
    for i in range(n):
        lo_term = grid[i].scale_length(length)
        hi_term = grid[i + 1].scale_length(length)
        lower = lo_term if lower is None else lower + lo_term
        upper = hi_term if upper is None else upper + hi_term
    half = Fraction(1, 2) if f.backend == RATIONAL else 0.5
    value = (lower + upper).scale(half)
    return IntegralResult(value, Bracket(lower, upper), partitions_used=n, backend=f.backend)


def _dyadic_midpoint_partition(f: LatticeFunction, k: int) -> TaggedPartition:
    """Uniform dyadic grid joined with the integrand's own breakpoints,
    midpoint tags.  Aligning with the breakpoints makes step integrands
    exact at every depth."""
    cuts = sorted({Fraction(i, 2**k) for i in range(2**k + 1)} | set(f.breakpoints()))
    items = []
    for a, b in zip(cuts, cuts[1:]):
        iv = Interval(a, b)
        items.append((iv, iv.midpoint()))
    return TaggedPartition(items)


def _random_midpoint_partition(f: LatticeFunction, delta: Fraction, rng: random.Random) -> TaggedPartition:
    """Random-width, midpoint-tagged partition aligned with the integrand's
    breakpoints; fine for the constant gage delta by construction."""
    anchors = sorted({ZERO, ONE} | {c for c in f.breakpoints() if ZERO < c < ONE})
    items = []
    for seg_a, seg_b in zip(anchors, anchors[1:]):
        x = seg_a
        while x < seg_b:
            width = delta * Fraction(rng.randrange(1, 2**16), 2**16)
            y = min(seg_b, x + width)
            iv = Interval(x, y)
            items.append((iv, iv.midpoint()))
            x = y
    return TaggedPartition(items)


def integrate_norm_adaptive(
    f: LatticeFunction,
    space: Space,
    eps,
    max_depth: int = 20,
    seed: int = 0,
) -> IntegralResult:
    """Norm-type integral by uniform dyadic refinement with midpoint tags.

    Stops when consecutive Riemann sums differ by at most eps in the space
    norm and a seeded-random fine partition (random widths, midpoint tags,
    breakpoint-aligned) agrees within 2 * eps.
    """
    eps = as_scalar(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    exact_cmp = f.backend == RATIONAL and not isinstance(eps, float)
    eps_cmp = eps if exact_cmp else float(eps)

    def within(value, bound) -> bool:
        return (value <= bound) if exact_cmp else (float(value) <= float(bound))

    rng = random.Random(seed)
    prev = riemann_sum(f, _dyadic_midpoint_partition(f, 0))
    used = 1
    for k in range(1, max_depth + 1):
        cur = riemann_sum(f, _dyadic_midpoint_partition(f, k))
        used += 2**k
        gap = abs(cur - prev)
        if within(space.norm(gap), eps_cmp):
            pi = _random_midpoint_partition(f, Fraction(1, 2**k), rng)
            used += len(pi)
            cross = space.norm(abs(riemann_sum(f, pi) - cur))
            if within(cross, eps_cmp * 2 if exact_cmp else float(eps_cmp) * 2):
                return IntegralResult(cur, CauchyGap(gap, level=k), partitions_used=used, backend=f.backend)
        prev = cur
    raise NoConvergenceError(f"{f.name}: no convergence within depth {max_depth}")


def _bracket_count_for(f: LatticeFunction, bound: LatticeVector) -> int:
    """Smallest m with (f(1) - f(0))/m <= bound componentwise."""
    delta = f.evaluate(ONE) - f.evaluate(ZERO)
    m = 1
    for d, b in zip(delta.entries, bound.entries):
        if d == 0:
            continue
        if b <= 0:
            raise ValueError("order bound must be positive")
        if isinstance(d, float) or isinstance(b, float):
            m = max(m, ceil_div(float(d) / float(b)))
        else:
            m = max(m, ceil_div(d / b))
    return m


def integrate_order(f: LatticeFunction, oseq: OSequence, n: int) -> IntegralResult:
    """Order-type integral with the certified bound taken from b_n.

    Step functions are exact.  Monotone functions are bracketed with the
    partition count chosen so the bracket width is at most b_n.  Finite
    almost-everywhere modifications inherit the base integral; the
    certificate widens by 2M/n for a majorant M of |base| and |modified|.
    """
    if n < 1:
        raise ValueError(f"o-sequence index must be >= 1, got {n}")
    if getattr(f, "is_step", False):
        return integrate_step(f)
    if isinstance(f, AeModifiedFunction):
        base_result = integrate_order(f.base, oseq, n)
        big_m = f.bound_abs()
        widen_scale = Fraction(2, n) if big_m.backend == RATIONAL else 2.0 / n
        widen = big_m.scale(widen_scale)
        base_gap = base_result.half_gap()
        return IntegralResult(
            value=base_result.value,
            certificate=CauchyGap(base_gap + widen, level=n),
            partitions_used=base_result.partitions_used,
            backend=f.backend,
        )
    if f.is_monotone:
        b_n = oseq(n)
        if b_n.dim != f.dim:
            raise ValueError("o-sequence dimension does not match the integrand")
        m = _bracket_count_for(f, b_n)
        return integrate_monotone(f, m)
    raise UnsupportedClassError(
        f"{f.name}: no constructive order-integration schedule for this class"
    )


class IndefiniteIntegral:
    """The interval function A -> integral of f over A, with a cache.

    Dispatch: exact closed forms where available, otherwise monotone
    bracketing at a fixed precision.  Reads of the cache are lock-free;
    writes are serialized.
    """

    def __init__(self, f: LatticeFunction, precision=Fraction(1, 10**12)):
        self.integrand = f
        self.precision = Fraction(precision)
        self._cache: Dict[Tuple[Fraction, Fraction], Tuple[LatticeVector, str]] = {}
        self._signs: Dict[Tuple[Fraction, Fraction], List[Fraction]] = {}
        self._lock = threading.Lock()
        if f.supports_exact_integral:
            self._method = "exact"
        elif f.is_monotone:
            self._method = "bracket"
        else:
            raise UnsupportedClassError(f"{f.name}: indefinite integral unavailable")

    def method_for(self, a, b) -> str:
        self.query_interval(a, b)
        return self._cache[(Fraction(a), Fraction(b))][1]

    def query_interval(self, a, b) -> LatticeVector:
        a, b = Fraction(a), Fraction(b)
        if not (ZERO <= a <= b <= ONE):
            raise ValueError(f"bad query range [{a}, {b}]")
        if a == b:
            return LatticeVector.zeros(self.integrand.dim, self.integrand.backend)
        key = (a, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit[0]
        if self._method == "exact":
            value = self.integrand.exact_integral(a, b)
        else:
            value = self._bracket_restriction(a, b)
        with self._lock:
            self._cache[key] = (value, self._method)
        return value

    def _bracket_restriction(self, a: Fraction, b: Fraction) -> LatticeVector:
        f = self.integrand
        delta = f.evaluate(b) - f.evaluate(a)
        worst = max(delta.entries) if delta.entries else ZERO
        m = max(1, ceil_div(Fraction(worst) * (b - a) / self.precision)) if worst > 0 else 1
        m = min(m, 1 << 22)
        step = (b - a) / m
        grid = [f.evaluate(a + i * step) for i in range(m + 1)]
        lower = upper = None
        for i in range(m):
            lo = grid[i].scale_length(step)
            hi = grid[i + 1].scale_length(step)
            lower = lo if lower is None else lower + lo
            upper = hi if upper is None else upper + hi
        half = Fraction(1, 2) if f.backend == RATIONAL else 0.5
        return (lower + upper).scale(half)

    def query(self, parts: Union[Interval, Sequence[Interval], Tuple]) -> LatticeVector:
        """Integral over a finite union of pairwise disjoint intervals."""
        if isinstance(parts, Interval):
            parts = [parts]
        elif isinstance(parts, tuple) and len(parts) == 2 and not isinstance(parts[0], Interval):
            parts = [Interval(parts[0], parts[1])]
        total = LatticeVector.zeros(self.integrand.dim, self.integrand.backend)
        seen: List[Interval] = []
        for iv in parts:
            for other in seen:
                if iv.a < other.b and other.a < iv.b:
                    raise ValueError("query intervals must be pairwise disjoint")
            seen.append(iv)
            total = total + self.query_interval(iv.a, iv.b)
        return total


def indefinite(f: LatticeFunction, precision=Fraction(1, 10**12)) -> IndefiniteIntegral:
    return IndefiniteIntegral(f, precision)


# ---------------------------------------------------------------------------
# the modulus of the indefinite integral
# ---------------------------------------------------------------------------


_BISECT_WIDTH = Fraction(1, 2**40)


def _locate_sign_changes(f: LatticeFunction, a: Fraction, b: Fraction, scan: int = 256) -> List[Fraction]:
    """Sign-change points of every component, located by bisection on a
    scan grid.  Works from function evaluations only, independent of any
    root-finding machinery; each change contributes its final bracket's
    both endpoints so the change is confined to one tiny cell."""
    cuts = sorted({a, b} | {c for c in f.breakpoints() if a < c < b}
                  | {a + (b - a) * Fraction(k, scan) for k in range(scan + 1)})
    out: List[Fraction] = []
    for j in range(f.dim):
        vals = [f.evaluate(x).entries[j] for x in cuts]
        for i in range(len(cuts) - 1):
            va, vb = vals[i], vals[i + 1]
            if va == 0 or vb == 0 or (va > 0) == (vb > 0):
                continue
            lo, hi = cuts[i], cuts[i + 1]
            flo = va
            while hi - lo > _BISECT_WIDTH:
                mid = (lo + hi) / 2
                fmid = f.evaluate(mid).entries[j]
                if fmid == 0:
                    lo, hi = mid - _BISECT_WIDTH / 2, mid + _BISECT_WIDTH / 2
                    break
                if (fmid > 0) == (flo > 0):
                    lo, flo = mid, fmid
                else:
                    hi = mid
            out.extend([x for x in (lo, hi) if a < x < b])
    return sorted(set(out))


def modulus_measure(mu_f: IndefiniteIntegral, a=ZERO, b=ONE, depth: int = 6) -> LatticeVector:
    """Lower approximation of sup over finite partitions of sum |mu_f(B)|.

    The partition family is the uniform 2^depth grid of [a,b] joined with
    bisection-located sign-change cells of each component, so it is nested
    in depth and the result never decreases with depth.  Each |mu_f(B)|
    is dominated by the integral of |f| over B, so the result never
    exceeds the modulus-integrand oracle.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    a, b = Fraction(a), Fraction(b)
    f = mu_f.integrand
    sign_points = mu_f._signs.get((a, b))
    if sign_points is None:
        sign_points = _locate_sign_changes(f, a, b)
        with mu_f._lock:
            mu_f._signs[(a, b)] = sign_points
    cuts = sorted({a, b} | set(sign_points)
                  | {a + (b - a) * Fraction(k, 2**depth) for k in range(2**depth + 1)})
    total = LatticeVector.zeros(f.dim, f.backend)
    for lo, hi in zip(cuts, cuts[1:]):
        total = total + abs(mu_f.query_interval(lo, hi))
    return total


def modulus_profile(mu_f: IndefiniteIntegral, a=ZERO, b=ONE, depth: int = 6) -> List[LatticeVector]:
    """modulus_measure at every depth 0..depth (nondecreasing sequence)."""
    return [modulus_measure(mu_f, a, b, k) for k in range(depth + 1)]
