"""Executable checks for the order-integral theorems.

Each check samples gage-fine partitions (seeded, reproducible), measures
the quantity the theorem bounds, and compares it to the o-sequence bound
with zero tolerance on the rational backend.  Deterministic adversarial
trials (envelope-extremal tags) are mixed in so the achieved quantity
approaches the certified supremum; scaling the bound by 1/2 must then
produce violations, which is the suite's negative control against
vacuously-passing checks.

Reports distinguish "no violation in k trials" from proof; a violating
trial serializes its partitions so it replays deterministically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .envelopes import binding_component, extremal_partition, extremal_tag
from .errors import UnsupportedClassError, UnsupportedFormError
from .functions import AeModifiedFunction, LatticeFunction, StepFunction, modulus_fn
from .integrate import (
    IndefiniteIntegral,
    indefinite,
    integrate_order,
    modulus_profile,
)
from .lattice import L1, LatticeVector, OSequence, Space
from .partitions import (
    HENSTOCK,
    MCSHANE,
    Gage,
    Interval,
    TaggedPartition,
    cousin_items,
    is_fine,
    item_is_fine,
    random_fine_partition,
    riemann_sum,
)
from .scalars import FLOAT_TOL, RATIONAL, format_scalar
from .schedules import AeSchedule, Schedule, schedule_for

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    theorem: str
    function: str
    trials: int
    worst_slack: LatticeVector
    violated: bool
    seed: int
    n: Optional[int] = None
    witness: Optional[dict] = None
    control: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.violated and self.witness is None:
            raise ValueError("violated reports must carry a witness")
        if not self.violated and self.witness is not None:
            raise ValueError("witness only accompanies a violation")

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "function": self.function,
            "n": self.n,
            "trials": self.trials,
            "worst_slack": self.worst_slack.to_json(),
            "violated": self.violated,
            "control": self.control,
            "seed": self.seed,
            "witness": self.witness,
            "details": self.details,
        }

    def csv_row(self) -> dict:
        return {
            "theorem": self.theorem,
            "function": self.function,
            "n": "" if self.n is None else self.n,
            "trials": self.trials,
            "worst_slack": ";".join(
                repr(float(e)) for e in self.worst_slack.entries
            ),
            "violated": int(self.violated),
            "control": int(self.control),
            "seed": self.seed,
        }


def _float_tol(bound_entry) -> float:
    return FLOAT_TOL * max(1.0, abs(float(bound_entry)))


class _Reducer:
    """Commutative trial merge: componentwise max of achieved quantities,
    OR of violations, first violating witness kept."""

    def __init__(self, bound: LatticeVector, exact: bool):
        self.bound = bound
        self.exact = exact
        self.worst: Optional[LatticeVector] = None
        self.violated = False
        self.witness: Optional[dict] = None
        self.trials = 0

    def add(self, achieved: LatticeVector, witness_payload) -> None:
        self.trials += 1
        self.worst = achieved if self.worst is None else self.worst.join(achieved)
        if not self.violated:
            for j, (a, b) in enumerate(zip(achieved.entries, self.bound.entries)):
                over = (a > b) if self.exact else (float(a) > float(b) + _float_tol(b))
                if over:
                    self.violated = True
                    payload = witness_payload() if callable(witness_payload) else witness_payload
                    self.witness = dict(payload)
                    self.witness.update(
                        {
                            "component": j,
                            "achieved": achieved.to_json(),
                            "bound": self.bound.to_json(),
                        }
                    )
                    break

    def slack(self) -> LatticeVector:
        if self.worst is None:
            return self.bound
        if self.bound.backend == self.worst.backend:
            return self.bound - self.worst
        return self.bound.to_float() - self.worst.to_float()


def _scale_vec(v: LatticeVector, scale: Fraction) -> LatticeVector:
    return v.scale(scale if v.backend == RATIONAL else float(scale))


def _replay(theorem: str, f: LatticeFunction, n, trials, seed) -> dict:
    return {
        "theorem": theorem,
        "function": f.name,
        "n": n,
        "trials": trials,
        "seed": seed,
        "command": f"gaugeint verify --check {theorem} --function {f.name} "
                   f"--n {n} --trials {trials} --seed {seed}",
    }


def default_osequence(f: LatticeFunction) -> OSequence:
    """Natural o-sequence scale per class: total jump * min gap for step
    functions (keeps the gage bound-binding for n >= 4), the variation for
    bounded-variation forms, the base's for finite modifications."""
    if isinstance(f, AeModifiedFunction):
        return default_osequence(f.base)
    if isinstance(f, StepFunction):
        gap = f.min_gap()
        tv = f.total_variation()
        entries = [e * gap if e > 0 else Fraction(1) for e in tv.entries] \
            if tv.backend == RATIONAL else [e * float(gap) if e > 0 else 1.0 for e in tv.entries]
        return OSequence.harmonic(LatticeVector(entries))
    tv = f.total_variation()
    one = Fraction(1) if tv.backend == RATIONAL else 1.0
    return OSequence.harmonic(LatticeVector([e if e > 0 else one for e in tv.entries]))


def _setup(f, oseq, n, schedule) -> Tuple[OSequence, Schedule, Gage, bool]:
    oseq = oseq or default_osequence(f)
    schedule = schedule or schedule_for(f, oseq)
    gage = schedule.gage(n)
    exact = f.backend == RATIONAL
    return oseq, schedule, gage, exact


def _trial_kinds(discipline: str, i: int) -> Tuple[str, str]:
    if discipline == "henstock":
        return HENSTOCK, HENSTOCK
    if discipline == "free":
        return MCSHANE, MCSHANE
    if discipline == "cross":
        return HENSTOCK, MCSHANE
    pick = (HENSTOCK, MCSHANE)
    return pick[i % 2], pick[(i // 2) % 2]


_STYLES = ("walk", "cousin")


# ---------------------------------------------------------------------------
# partition-sum checks
# ---------------------------------------------------------------------------


def check_cauchy(
    f: LatticeFunction,
    oseq: Optional[OSequence] = None,
    *,
    n: int = 8,
    trials: int = 100,
    seed: int = 0,
    discipline: str = "both",
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
    schedule: Optional[Schedule] = None,
) -> CheckReport:
    """|sigma(f,P) - sigma(f,P')| <= b_n over pairs of gage-fine partitions."""
    oseq, schedule, gage, exact = _setup(f, oseq, n, schedule)
    bound = _scale_vec(schedule.asserted_bound(n), bound_scale)
    red = _Reducer(bound, exact)
    rng = random.Random(seed)
    for i in range(trials):
        k1, k2 = _trial_kinds(discipline, i)
        p1 = random_fine_partition(gage, rng, kind=k1, style=_STYLES[i % 2])
        p2 = random_fine_partition(gage, rng, kind=k2, style=_STYLES[(i + 1) % 2])
        achieved = abs(riemann_sum(f, p1) - riemann_sum(f, p2))
        red.add(achieved, lambda p1=p1, p2=p2: {
            "partition": p1.to_json(), "partition2": p2.to_json(),
            "replay": _replay("cauchy", f, n, trials, seed),
        })
    if include_adversarial:
        j = binding_component(bound, schedule.certified_bound(n))
        for henstock in (False, True):
            hi = extremal_partition(f, gage, j, +1, henstock=henstock)
            lo = extremal_partition(f, gage, j, -1, henstock=henstock)
            achieved = abs(riemann_sum(f, hi) - riemann_sum(f, lo))
            red.add(achieved, lambda hi=hi, lo=lo: {
                "partition": hi.to_json(), "partition2": lo.to_json(),
                "replay": _replay("cauchy", f, n, trials, seed),
            })
    return CheckReport(
        theorem="cauchy", function=f.name, trials=red.trials,
        worst_slack=red.slack(), violated=red.violated, seed=seed, n=n,
        witness=red.witness, control=bound_scale != 1,
        details={
            "bound": bound.to_json(),
            "certified": schedule.certified_bound(n).to_json(),
            "discipline": discipline,
            "worst_achieved": (red.worst or LatticeVector.zeros(f.dim, f.backend)).to_json(),
        },
    )


def _pointwise_sum(f, mu: IndefiniteIntegral, pi: TaggedPartition) -> LatticeVector:
    total = LatticeVector.zeros(f.dim, f.backend)
    for iv, t in pi.items:
        term = f.evaluate(t).scale_length(iv.length) - mu.query_interval(iv.a, iv.b)
        total = total + abs(term)
    return total


def _pointwise_adversarial(f, gage, mu, component: int) -> TaggedPartition:
    """Per-interval tag maximizing the pointwise deviation |f(t)m(E) - mu(E)|
    in one component: try the hi and lo extremal tags, keep the better."""
    base = extremal_partition(f, gage, component, +1)
    items = []
    for iv, t_hi in base.items:
        t_lo = extremal_tag(f, gage, iv, component, -1, fallback=t_hi)
        target = mu.query_interval(iv.a, iv.b).entries[component]
        dev_hi = abs(f.evaluate(t_hi).entries[component] * (
            iv.length if f.backend == RATIONAL else float(iv.length)) - target)
        dev_lo = abs(f.evaluate(t_lo).entries[component] * (
            iv.length if f.backend == RATIONAL else float(iv.length)) - target)
        items.append((iv, t_hi if dev_hi >= dev_lo else t_lo))
    return TaggedPartition(items, kind=MCSHANE)


def check_pointwise_sums(
    f: LatticeFunction,
    oseq: Optional[OSequence] = None,
    *,
    n: int = 8,
    trials: int = 100,
    seed: int = 0,
    discipline: str = "both",
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
    schedule: Optional[Schedule] = None,
) -> CheckReport:
    """Sum over E of |f(tag) m(E) - integral over E| <= b_n."""
    oseq, schedule, gage, exact = _setup(f, oseq, n, schedule)
    mu = indefinite(f)
    bound = _scale_vec(schedule.asserted_bound(n), bound_scale)
    red = _Reducer(bound, exact)
    rng = random.Random(seed)
    for i in range(trials):
        kind = _trial_kinds(discipline, i)[0]
        pi = random_fine_partition(gage, rng, kind=kind, style=_STYLES[i % 2])
        red.add(_pointwise_sum(f, mu, pi), lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("pointwise_sums", f, n, trials, seed),
        })
    if include_adversarial:
        j = binding_component(bound, schedule.certified_bound(n))
        pi = _pointwise_adversarial(f, gage, mu, j)
        red.add(_pointwise_sum(f, mu, pi), lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("pointwise_sums", f, n, trials, seed),
        })
    return CheckReport(
        theorem="pointwise_sums", function=f.name, trials=red.trials,
        worst_slack=red.slack(), violated=red.violated, seed=seed, n=n,
        witness=red.witness, control=bound_scale != 1,
        details={
            "bound": bound.to_json(),
            "certified": schedule.certified_bound(n).to_json(),
            "discipline": discipline,
            "worst_achieved": (red.worst or LatticeVector.zeros(f.dim, f.backend)).to_json(),
        },
    )


def _random_valid_tags(pi: TaggedPartition, gage: Gage, rng: random.Random, free: bool) -> List[Fraction]:
    tags = []
    for iv, t in pi.items:
        tag = t
        for _ in range(6):
            if free:
                g = gage(iv.midpoint())
                lo, hi = max(ZERO, iv.b - g), min(ONE, iv.a + g)
                cand = lo + (hi - lo) * Fraction(rng.randrange(0, 2**12), 2**12) if hi > lo else iv.a
            else:
                cand = iv.a + iv.length * Fraction(rng.randrange(0, 2**12), 2**12)
            if item_is_fine(gage, iv, cand) and (free or iv.contains_tag(cand)):
                tag = cand
                break
        tags.append(tag)
    return tags


def check_tag_swap(
    f: LatticeFunction,
    oseq: Optional[OSequence] = None,
    *,
    n: int = 8,
    trials: int = 100,
    seed: int = 0,
    discipline: str = "both",
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
    schedule: Optional[Schedule] = None,
) -> CheckReport:
    """Sum over E of |f(t_E) - f(t'_E)| m(E) <= b_n for two valid taggings."""
    oseq, schedule, gage, exact = _setup(f, oseq, n, schedule)
    bound = _scale_vec(schedule.asserted_bound(n), bound_scale)
    red = _Reducer(bound, exact)
    rng = random.Random(seed)

    def swap_sum(pi: TaggedPartition, tags2: Sequence[Fraction]) -> LatticeVector:
        total = LatticeVector.zeros(f.dim, f.backend)
        for (iv, t1), t2 in zip(pi.items, tags2):
            total = total + abs(f.evaluate(t1) - f.evaluate(t2)).scale_length(iv.length)
        return total

    for i in range(trials):
        kind = _trial_kinds(discipline, i)[0]
        pi = random_fine_partition(gage, rng, kind=kind, style=_STYLES[i % 2])
        tags2 = _random_valid_tags(pi, gage, rng, free=(kind == MCSHANE))
        red.add(swap_sum(pi, tags2), lambda pi=pi, tags2=tags2: {
            "partition": pi.to_json(),
            "tags2": [format_scalar(t) for t in tags2],
            "replay": _replay("tag_swap", f, n, trials, seed),
        })
    if include_adversarial:
        j = binding_component(bound, schedule.certified_bound(n))
        for henstock in (False, True):
            pi = extremal_partition(f, gage, j, +1, henstock=henstock)
            tags2 = [
                extremal_tag(f, gage, iv, j, -1, henstock=henstock, fallback=t)
                for iv, t in pi.items
            ]
            red.add(swap_sum(pi, tags2), lambda pi=pi, tags2=tags2: {
                "partition": pi.to_json(),
                "tags2": [format_scalar(t) for t in tags2],
                "replay": _replay("tag_swap", f, n, trials, seed),
            })
    return CheckReport(
        theorem="tag_swap", function=f.name, trials=red.trials,
        worst_slack=red.slack(), violated=red.violated, seed=seed, n=n,
        witness=red.witness, control=bound_scale != 1,
        details={
            "bound": bound.to_json(),
            "certified": schedule.certified_bound(n).to_json(),
            "discipline": discipline,
            "worst_achieved": (red.worst or LatticeVector.zeros(f.dim, f.backend)).to_json(),
        },
    )


def _items_sum(f, items) -> LatticeVector:
    total = None
    for sub, t in items:
        term = f.evaluate(t).scale_length(sub.length)
        total = term if total is None else total + term
    return total


def _shifted_extreme_sums(f, gage: Gage, iv: Interval):
    """Henstock subpartition pair with pieces just narrower than the local
    radius, right-tagged versus left-tagged: their sums approach the
    envelope extremes over the interval (tags at piece endpoints spread a
    value across the whole piece)."""
    c = gage(iv.midpoint())
    from .scalars import ceil_div

    k = max(1, ceil_div(iv.length * Fraction(64, 63) / c))
    step = iv.length / k
    subs = [Interval(iv.a + i * step, iv.a + (i + 1) * step) for i in range(k)]
    right = [(s, s.b) for s in subs]
    left = [(s, s.a) for s in subs]
    if all(item_is_fine(gage, s, t) for s, t in right) and all(
        item_is_fine(gage, s, t) for s, t in left
    ):
        return _items_sum(f, right), _items_sum(f, left)
    return None


def _sampled_ob(f, gage: Gage, iv: Interval, rng: random.Random, pairs: int = 3) -> LatticeVector:
    """Lower bound for the interval-local oscillation: max over sampled
    pairs of Henstock subpartition sums of E."""
    sums = []
    for policy in ("left", "right", "midpoint"):
        sums.append(_items_sum(f, cousin_items(gage, iv, tag_policy=policy)))
    for _ in range(pairs):
        sums.append(_items_sum(f, cousin_items(gage, iv, tag_policy="random", rng=rng)))
    shifted = _shifted_extreme_sums(f, gage, iv)
    if shifted is not None:
        sums.extend(shifted)
    worst = LatticeVector.zeros(f.dim, f.backend)
    for i, a in enumerate(sums):
        for b in sums[i + 1:]:
            worst = worst.join(abs(a - b))
    return worst


def _zone_partition(f, gage: Gage, schedule: Schedule, n: int) -> Optional[TaggedPartition]:
    """Fine Henstock partition with one interval covering (almost) each
    region where the envelopes disagree, tagged at the jump point inside;
    maximizes the oscillation sum for step integrands."""
    if not isinstance(f, StepFunction):
        return None
    from .envelopes import step_envelope_cells

    cells = step_envelope_cells(f, gage)
    runs: List[Tuple[Fraction, Fraction]] = []
    for u, v, inf_vec, sup_vec in cells:
        if (sup_vec - inf_vec).is_zero():
            continue
        if runs and runs[-1][1] == u:
            runs[-1] = (runs[-1][0], v)
        else:
            runs.append((u, v))
    if not runs:
        return None
    items = []
    cursor = ZERO
    for u, v in runs:
        shave = (v - u) / 1024
        lo = u + shave if u > ZERO else u
        if cursor < lo:
            items.extend(cousin_items(gage, Interval(cursor, lo)))
        iv = Interval(lo, v)
        tag = None
        for c in f.breakpoints():
            if iv.contains_tag(c) and item_is_fine(gage, iv, c):
                tag = c
                break
        if tag is None:
            items.extend(cousin_items(gage, iv))
        else:
            items.append((iv, tag))
        cursor = v
    if cursor < ONE:
        items.extend(cousin_items(gage, Interval(cursor, ONE)))
    pi = TaggedPartition(items, kind=HENSTOCK)
    return pi if is_fine(gage, pi) else None


def _bv_wide_partition(gage: Gage) -> Optional[TaggedPartition]:
    """Uniform midpoint partition with cells as wide as a constant gage
    allows (just under twice the radius); interval-local oscillations are
    largest on wide cells, so this drives the oscillation-sum check
    toward its supremum for bounded-variation integrands."""
    if len(gage.values) != 1:
        return None
    c = gage.values[0]
    if c >= 1:
        return None
    from .scalars import ceil_div

    k = ceil_div(Fraction(64, 126) / c)  # width 1/k <= 2c * 63/64
    items = []
    for i in range(k):
        iv = Interval(Fraction(i, k), Fraction(i + 1, k))
        items.append((iv, iv.midpoint()))
    pi = TaggedPartition(items, kind=HENSTOCK)
    return pi if is_fine(gage, pi) else None


def check_henstock_lemma(
    f: LatticeFunction,
    oseq: Optional[OSequence] = None,
    *,
    n: int = 8,
    trials: int = 50,
    seed: int = 0,
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
    schedule: Optional[Schedule] = None,
) -> CheckReport:
    """Sum over E of Ob(f, E) <= b_n: interval-local oscillation sums.

    Ob is computed exactly (envelope integrals) for step integrands and
    closed-form monotone ones, and lower-bounded by sampled subpartition
    pairs otherwise.
    """
    oseq, schedule, gage, exact = _setup(f, oseq, n, schedule)
    bound = _scale_vec(schedule.asserted_bound(n), bound_scale)
    red = _Reducer(bound, exact)
    rng = random.Random(seed)
    ob_is_exact = schedule.ob_exact(n, Interval(ZERO, HALF)) is not None

    def ob_sum(pi: TaggedPartition) -> LatticeVector:
        total = LatticeVector.zeros(f.dim, f.backend)
        for iv, _ in pi.items:
            ob = schedule.ob_exact(n, iv)
            if ob is None:
                ob = _sampled_ob(f, gage, iv, rng)
            total = total + ob
        return total

    for i in range(trials):
        pi = random_fine_partition(gage, rng, kind=HENSTOCK, style=_STYLES[i % 2])
        red.add(ob_sum(pi), lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("henstock_lemma", f, n, trials, seed),
        })
    if include_adversarial:
        for pi in (_zone_partition(f, gage, schedule, n), _bv_wide_partition(gage)):
            if pi is not None:
                red.add(ob_sum(pi), lambda pi=pi: {
                    "partition": pi.to_json(),
                    "replay": _replay("henstock_lemma", f, n, trials, seed),
                })
    return CheckReport(
        theorem="henstock_lemma", function=f.name, trials=red.trials,
        worst_slack=red.slack(), violated=red.violated, seed=seed, n=n,
        witness=red.witness, control=bound_scale != 1,
        details={
            "bound": bound.to_json(),
            "certified": schedule.certified_bound(n).to_json(),
            "ob_exact": ob_is_exact,
            "worst_achieved": (red.worst or LatticeVector.zeros(f.dim, f.backend)).to_json(),
        },
    )


# ---------------------------------------------------------------------------
# identity and comparison checks
# ---------------------------------------------------------------------------


def check_modulus_identity(
    f: LatticeFunction,
    *,
    depth: int = 6,
    tol: Fraction = Fraction(1, 10**6),
    seed: int = 0,
) -> CheckReport:
    """The modulus of the indefinite integral equals the indefinite
    integral of |f|: the partition-sum approximation must increase with
    depth, never exceed the |f| oracle, and close the gap at full depth."""
    mu = indefinite(f)
    oracle = modulus_fn(f).exact_integral(ZERO, ONE)
    profile = modulus_profile(mu, depth=depth)
    exact = f.backend == RATIONAL
    problems = []
    for k in range(1, len(profile)):
        if not _le_with_tol(profile[k - 1], profile[k], exact):
            problems.append(f"decreasing at depth {k}")
    for k, val in enumerate(profile):
        if not _le_with_tol(val, oracle, exact):
            problems.append(f"overshoot at depth {k}")
    gap = (oracle - profile[-1]) if exact else (oracle.to_float() - profile[-1].to_float())
    tol_vec = LatticeVector([tol] * f.dim) if exact else LatticeVector([float(tol)] * f.dim)
    slack = tol_vec - gap
    if not _le_with_tol(gap, tol_vec, exact):
        problems.append(f"gap above {tol} at depth {depth}")
    violated = bool(problems)
    witness = None
    if violated:
        witness = {
            "problems": problems,
            "profile": [v.to_json() for v in profile],
            "oracle": oracle.to_json(),
            "replay": _replay("modulus_identity", f, depth, 1, seed),
        }
    return CheckReport(
        theorem="modulus_identity", function=f.name, trials=len(profile),
        worst_slack=slack, violated=violated, seed=seed, n=depth,
        witness=witness,
        details={
            "oracle": oracle.to_json(),
            "final": profile[-1].to_json(),
            "gap": gap.to_json(),
            "profile": [v.to_json() for v in profile],
        },
    )


def _le_with_tol(a: LatticeVector, b: LatticeVector, exact: bool) -> bool:
    if exact:
        return a.le(b)
    return all(float(x) <= float(y) + _float_tol(y) for x, y in zip(a.entries, b.entries))


def check_abs_integral(
    f: LatticeFunction,
    *,
    trials: int = 32,
    seed: int = 0,
) -> CheckReport:
    """|integral of f over A| <= integral of |f| over A, on an interval family."""
    mu = indefinite(f)
    mu_abs = indefinite(modulus_fn(f))
    exact = f.backend == RATIONAL
    rng = random.Random(seed)
    ranges = [(ZERO, ONE)] + [(Fraction(k, 8), Fraction(k + 1, 8)) for k in range(8)]
    for _ in range(max(0, trials - len(ranges))):
        a = Fraction(rng.randrange(0, 2**10), 2**10)
        b = Fraction(rng.randrange(0, 2**10), 2**10)
        if a > b:
            a, b = b, a
        if a < b:
            ranges.append((a, b))
    worst = None
    violated = False
    witness = None
    for a, b in ranges:
        lhs = abs(mu.query_interval(a, b))
        rhs = mu_abs.query_interval(a, b)
        slack = (rhs - lhs) if exact else (rhs.to_float() - lhs.to_float())
        worst = slack if worst is None else worst.meet(slack)
        if not violated and not _le_with_tol(lhs, rhs, exact):
            violated = True
            witness = {
                "range": [format_scalar(a), format_scalar(b)],
                "lhs": lhs.to_json(),
                "rhs": rhs.to_json(),
                "replay": _replay("abs_integral", f, None, trials, seed),
            }
    return CheckReport(
        theorem="abs_integral", function=f.name, trials=len(ranges),
        worst_slack=worst, violated=violated, seed=seed,
        witness=witness, details={"ranges": len(ranges)},
    )


def check_variational(
    f: LatticeFunction,
    space: Optional[Space] = None,
    *,
    eps: Fraction = Fraction(1, 100),
    trials: int = 20,
    seed: int = 0,
    oseq: Optional[OSequence] = None,
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
) -> CheckReport:
    """Variational sums in an L1 space: with N chosen so ||b_N||_1 <= eps,
    every gage-fine partition keeps the summed per-interval error norms
    within eps.  Also asserts the L1 positive-additivity identity exactly
    on the rational backend."""
    space = space or Space(f.dim, L1)
    if space.norm_kind != L1:
        raise ValueError("variational check needs an L1 space")
    oseq = oseq or default_osequence(f)
    n_idx = oseq.index_norm_below(space, eps)
    schedule = schedule_for(f, oseq)
    gage = schedule.gage(n_idx)
    mu = indefinite(f)
    exact = f.backend == RATIONAL
    eps_scaled = eps * bound_scale
    bound = LatticeVector([eps_scaled if exact else float(eps_scaled)])
    red = _Reducer(bound, exact)
    rng = random.Random(seed)
    identity_broken = None

    def variational_sum(pi: TaggedPartition):
        nonlocal identity_broken
        terms = []
        for iv, t in pi.items:
            terms.append(abs(f.evaluate(t).scale_length(iv.length) - mu.query_interval(iv.a, iv.b)))
        total_norm = sum((space.norm(x) for x in terms),
                         start=ZERO if exact else 0.0)
        if exact:
            vec_sum = terms[0]
            for x in terms[1:]:
                vec_sum = vec_sum + x
            if space.norm(vec_sum) != total_norm and identity_broken is None:
                identity_broken = {
                    "sum_of_norms": format_scalar(total_norm),
                    "norm_of_sum": format_scalar(space.norm(vec_sum)),
                }
        return LatticeVector([total_norm])

    for i in range(trials):
        kind = _trial_kinds("both", i)[0]
        pi = random_fine_partition(gage, rng, kind=kind, style=_STYLES[i % 2])
        red.add(variational_sum(pi), lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("variational", f, n_idx, trials, seed),
        })
    if include_adversarial:
        j = binding_component(schedule.asserted_bound(n_idx), schedule.certified_bound(n_idx))
        pi = _pointwise_adversarial(f, gage, mu, j)
        red.add(variational_sum(pi), lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("variational", f, n_idx, trials, seed),
        })
    violated = red.violated or identity_broken is not None
    witness = red.witness
    if identity_broken is not None and witness is None:
        witness = {"l1_identity": identity_broken,
                   "replay": _replay("variational", f, n_idx, trials, seed)}
    return CheckReport(
        theorem="variational", function=f.name, trials=red.trials,
        worst_slack=red.slack(), violated=violated, seed=seed, n=n_idx,
        witness=witness, control=bound_scale != 1,
        details={
            "eps": format_scalar(eps),
            "N": n_idx,
            "worst_sum": (red.worst or LatticeVector.zeros(1, f.backend)).to_json(),
            "l1_identity_exact": identity_broken is None,
        },
    )


def check_ae_equality(
    f: LatticeFunction,
    g: AeModifiedFunction,
    oseq: Optional[OSequence] = None,
    *,
    n: int = 10,
    trials: int = 50,
    seed: int = 0,
    bound_scale: Fraction = Fraction(1),
    include_adversarial: bool = True,
) -> CheckReport:
    """Functions equal off a finite set integrate identically: partition
    sums of the modified function stay within b_n + 2M/n of the base
    integral once the gage pinches the exceptional points."""
    if g.base is not f:
        raise ValueError("g must be an a.e. modification of f")
    oseq = oseq or default_osequence(f)
    schedule = AeSchedule(g, oseq)
    gage = schedule.gage(n)
    exact = g.backend == RATIONAL
    j_val = f.exact_integral(ZERO, ONE) if f.supports_exact_integral \
        else integrate_order(f, oseq, n).value
    bound = _scale_vec(schedule.asserted_bound(n), bound_scale)
    red = _Reducer(bound, exact)
    rng = random.Random(seed)
    for i in range(trials):
        kind = _trial_kinds("both", i)[0]
        pi = random_fine_partition(gage, rng, kind=kind, style=_STYLES[i % 2])
        achieved = abs(riemann_sum(g, pi) - j_val)
        red.add(achieved, lambda pi=pi: {
            "partition": pi.to_json(),
            "replay": _replay("ae_equality", g, n, trials, seed),
        })
    if include_adversarial:
        j_bind = binding_component(bound, schedule.certified_bound(n))
        candidates = [_exception_pileup_partition(g, gage, schedule.zone_radius(n))]
        for sign in (+1, -1):
            candidates.append(_exception_pileup_partition(
                g, gage, schedule.zone_radius(n), component=j_bind, sign=sign
            ))
        for pi in candidates:
            if pi is None:
                continue
            achieved = abs(riemann_sum(g, pi) - j_val)
            red.add(achieved, lambda pi=pi: {
                "partition": pi.to_json(),
                "replay": _replay("ae_equality", g, n, trials, seed),
            })
    # the two integrals agree: exactly for exact certificates, within the
    # combined certificates otherwise
    res_f = integrate_order(f, oseq, n)
    res_g = integrate_order(g, oseq, n)
    integrals_match = res_f.value == res_g.value if exact else _le_with_tol(
        abs(res_f.value - res_g.value), res_f.half_gap() + res_g.half_gap(), False
    )
    violated = red.violated or not integrals_match
    witness = red.witness
    if not integrals_match and witness is None:
        witness = {
            "integral_base": res_f.value.to_json(),
            "integral_modified": res_g.value.to_json(),
            "replay": _replay("ae_equality", g, n, trials, seed),
        }
    return CheckReport(
        theorem="ae_equality", function=g.name, trials=red.trials,
        worst_slack=red.slack(), violated=violated, seed=seed, n=n,
        witness=witness, control=bound_scale != 1,
        details={
            "bound": bound.to_json(),
            "certified": schedule.certified_bound(n).to_json(),
            "integrals_match": integrals_match,
            "exceptions": len(g.exceptions),
            "worst_achieved": (red.worst or LatticeVector.zeros(g.dim, g.backend)).to_json(),
        },
    )


def _exception_pileup_partition(
    g: AeModifiedFunction,
    gage: Gage,
    r: Fraction,
    component: Optional[int] = None,
    sign: int = +1,
) -> Optional[TaggedPartition]:
    """Partition tagging both flanks of exceptional points at the point
    itself (maximal pileup), the rest Cousin-filled along the base's
    structure points.  With a component given, only exceptions pushing
    that component in the requested direction are piled up, which
    realizes the one-sided supremum the certificate is built from."""
    items = []
    cursor = ZERO
    cuts_between = sorted(set(g.base.breakpoints()))

    def fill(a: Fraction, b: Fraction) -> None:
        if a < b:
            for seg_a, seg_b in _segments(a, b, cuts_between):
                items.extend(cousin_items(gage, Interval(seg_a, seg_b)))

    for u, v in g.exceptions:
        if component is not None:
            diff = (v - g.base.evaluate(u)).entries[component]
            if (diff <= 0) if sign > 0 else (diff >= 0):
                continue
        lo = max(cursor, u - r + r / 1024)
        hi = min(ONE, u + r)
        fill(cursor, min(lo, u))
        cursor = min(lo, u)
        if cursor < u:
            flank = Interval(cursor, u)
            if item_is_fine(gage, flank, u):
                items.append((flank, u))
            else:
                items.extend(cousin_items(gage, flank))
            cursor = u
        if cursor < hi:
            flank = Interval(cursor, hi)
            if item_is_fine(gage, flank, u) and flank.contains_tag(u):
                items.append((flank, u))
            else:
                items.extend(cousin_items(gage, flank))
            cursor = hi
    fill(cursor, ONE)
    pi = TaggedPartition(items, kind=HENSTOCK)
    return pi if is_fine(gage, pi) else None


def _segments(lo: Fraction, hi: Fraction, cuts: Sequence[Fraction]):
    points = [lo] + [c for c in cuts if lo < c < hi] + [hi]
    return zip(points, points[1:])


def check_additivity(
    f: LatticeFunction,
    *,
    trials: int = 100,
    seed: int = 0,
    split_points: Optional[Sequence[Fraction]] = None,
) -> CheckReport:
    """query(A u B) = query(A) + query(B) across random splits, exactly on
    the rational backend; restrictions agree with prefix differences."""
    mu = indefinite(f)
    exact = f.backend == RATIONAL
    rng = random.Random(seed)
    whole = mu.query_interval(ZERO, ONE)
    worst_disc = LatticeVector.zeros(f.dim, f.backend)
    violated = False
    witness = None
    splits = list(split_points or [])
    while len(splits) < trials:
        splits.append(Fraction(rng.randrange(1, 2**12), 2**12))
    count = 0
    for s in splits:
        if not (ZERO < s < ONE):
            continue
        count += 1
        disc = abs(mu.query_interval(ZERO, s) + mu.query_interval(s, ONE) - whole)
        # three-way split and restriction-vs-prefix-difference consistency
        s2 = s / 2
        disc = disc.join(abs(
            mu.query_interval(ZERO, s2) + mu.query_interval(s2, s) + mu.query_interval(s, ONE) - whole
        ))
        disc = disc.join(abs(
            mu.query_interval(s2, s) - (mu.query_interval(ZERO, s) - mu.query_interval(ZERO, s2))
        ))
        worst_disc = worst_disc.join(disc)
        tol_vec = LatticeVector.zeros(f.dim, f.backend) if exact else \
            LatticeVector([_float_tol(1.0)] * f.dim)
        if not violated and not _le_with_tol(disc, tol_vec, exact):
            violated = True
            witness = {
                "split": format_scalar(s),
                "discrepancy": disc.to_json(),
                "replay": _replay("additivity", f, None, trials, seed),
            }
    slack = -worst_disc if exact else LatticeVector(
        [_float_tol(1.0) - float(d) for d in worst_disc.entries]
    )
    return CheckReport(
        theorem="additivity", function=f.name, trials=count,
        worst_slack=slack, violated=violated, seed=seed,
        witness=witness, details={"exact": exact},
    )


def dimension_sweep(
    *,
    d_list: Sequence[int] = (1, 2, 4, 8, 16, 32),
    n: int = 4,
    scaled: bool = True,
    trials: int = 12,
    seed: int = 0,
) -> Tuple[CheckReport, List[dict]]:
    """Escaping-block family across dimensions: the sup-order size of the
    pointwise error sums stays put (unscaled) while the L1 variational
    size grows with d; under 2^k block scaling both grow and the L1 row
    must be nondecreasing.  Closed-form envelope integrals give the exact
    worst case; sampled partitions give the achieved quantities."""
    from .envelopes import step_envelope_gap_integral
    from .functions import escaping_function

    gage = Gage.constant(Fraction(1, 4 * n))
    rows = []
    l1_bounds = []
    sup_bounds = []
    rng = random.Random(seed)
    for d in d_list:
        f = escaping_function(d, scaled=scaled)
        spread = step_envelope_gap_integral(f, gage)
        sup_bound = max(spread.entries)
        l1_bound = sum(spread.entries, start=ZERO)
        sup_bounds.append(sup_bound)
        l1_bounds.append(l1_bound)
        mu = indefinite(f)
        sup_ach, l1_ach = ZERO, ZERO
        for i in range(trials):
            pi = random_fine_partition(gage, rng, kind=_trial_kinds("both", i)[0])
            s = _pointwise_sum(f, mu, pi)
            sup_ach = max(sup_ach, max(s.entries))
            l1_ach = max(l1_ach, sum(s.entries, start=ZERO))
        j = binding_component(spread.join(LatticeVector.ones(d)), spread)
        s = _pointwise_sum(f, mu, _pointwise_adversarial(f, gage, mu, j))
        sup_ach = max(sup_ach, max(s.entries))
        l1_ach = max(l1_ach, sum(s.entries, start=ZERO))
        rows.append({
            "d": d,
            "scaled": scaled,
            "sup_bound": format_scalar(sup_bound),
            "l1_bound": format_scalar(l1_bound),
            "sup_achieved": format_scalar(sup_ach),
            "l1_achieved": format_scalar(l1_ach),
        })
    violated = False
    problems = []
    if scaled:
        for a, b in zip(l1_bounds, l1_bounds[1:]):
            if a > b:
                problems.append("l1 bound decreased with dimension")
                violated = True
    if rows and list(d_list)[0] == 1 and sup_bounds[0] != l1_bounds[0]:
        problems.append("scalar case: sup and l1 sizes differ")
        violated = True
    witness = {"problems": problems, "rows": rows} if violated else None
    report = CheckReport(
        theorem="dimension_sweep", function=f"escaping{'_scaled' if scaled else ''}",
        trials=trials * len(list(d_list)), worst_slack=LatticeVector([ZERO]),
        violated=violated, seed=seed, n=n, witness=witness, details={"rows": rows},
    )
    return report, rows


# ---------------------------------------------------------------------------
# suite composition
# ---------------------------------------------------------------------------


PARTITION_CHECKS = {
    "cauchy": check_cauchy,
    "henstock_lemma": check_henstock_lemma,
    "pointwise_sums": check_pointwise_sums,
    "tag_swap": check_tag_swap,
}


def _control_capable(schedule: Schedule, n: int) -> bool:
    """A halved bound can only be violated when the certified supremum
    exceeds half the asserted bound in some component."""
    cert = schedule.certified_bound(n)
    bound = schedule.asserted_bound(n)
    return any(
        float(c) > 0.51 * float(b) for c, b in zip(cert.entries, bound.entries) if b > 0
    )


def control_flip_pair() -> Tuple[StepFunction, AeModifiedFunction]:
    """Built-in instrument for the a.e.-equality negative control: the
    modification flips the sign of a constant, so the exceptional pileup
    exhausts the two-sided majorant bound."""
    base = StepFunction((0, 1), [LatticeVector([Fraction(-50)])], name="control_flip_base")
    flip = AeModifiedFunction(base, [(Fraction(2, 5), LatticeVector([Fraction(50)]))],
                              name="control_flip")
    return base, flip


def run_default_suite(
    corpus: Sequence[LatticeFunction],
    *,
    n: int = 8,
    trials: int = 40,
    depth: int = 6,
    eps: Fraction = Fraction(1, 100),
    seed: int = 0,
    checks: Optional[Sequence[str]] = None,
    functions: Optional[Sequence[str]] = None,
    with_controls: bool = True,
) -> List[CheckReport]:
    """The default verification pass over a corpus: every applicable check
    per function, plus halved-bound negative controls that must violate.
    Controls run where the schedule is bound-binding (a halved bound is
    falsifiable there); a built-in sign-flip pair guarantees at least one
    control regardless of the corpus."""
    reports: List[CheckReport] = []
    wanted = set(checks) if checks else None
    names = set(functions) if functions else None

    def want(check_name: str, fname: str) -> bool:
        if wanted is not None and check_name not in wanted:
            return False
        if names is not None and fname not in names:
            return False
        return True

    for idx, f in enumerate(corpus):
        fseed = seed + 1000 * idx
        if isinstance(f, AeModifiedFunction):
            if want("ae_equality", f.name):
                reports.append(check_ae_equality(f.base, f, n=n, trials=trials, seed=fseed))
                if with_controls and _control_capable(AeSchedule(f, default_osequence(f)), n):
                    reports.append(check_ae_equality(
                        f.base, f, n=n, trials=trials, seed=fseed, bound_scale=HALF
                    ))
            continue
        try:
            schedule = schedule_for(f, default_osequence(f))
        except UnsupportedClassError:
            schedule = None
        if schedule is not None:
            for name, fn in PARTITION_CHECKS.items():
                if want(name, f.name):
                    reports.append(fn(f, n=n, trials=trials, seed=fseed))
            if with_controls and _control_capable(schedule, n):
                if want("cauchy", f.name):
                    reports.append(check_cauchy(f, n=n, trials=8, seed=fseed, bound_scale=HALF))
                if want("henstock_lemma", f.name):
                    reports.append(check_henstock_lemma(f, n=n, trials=8, seed=fseed, bound_scale=HALF))
        if f.supports_exact_integral and want("additivity", f.name):
            reports.append(check_additivity(f, trials=trials, seed=fseed))
        try:
            modulus_fn(f)
            has_modulus = True
        except UnsupportedFormError:
            has_modulus = False
        if has_modulus and f.supports_exact_integral:
            if want("abs_integral", f.name):
                reports.append(check_abs_integral(f, trials=trials, seed=fseed))
            if f.backend == RATIONAL and want("modulus_identity", f.name):
                reports.append(check_modulus_identity(f, depth=depth, seed=fseed))
        if isinstance(f, StepFunction) and f.backend == RATIONAL and want("variational", f.name):
            reports.append(check_variational(f, eps=eps, trials=max(4, trials // 4), seed=fseed))
    if with_controls and (wanted is None or "ae_equality" in wanted) and names is None:
        base, flip = control_flip_pair()
        reports.append(check_ae_equality(
            base, flip, n=max(4, n), trials=8, seed=seed + 9999, bound_scale=HALF
        ))
    return reports
