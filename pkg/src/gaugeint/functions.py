"""Lattice-valued integrand families on [0,1].

Forms: step functions, piecewise closed-form functions built from a small
expression catalog (polynomials, sin/cos, exp), almost-everywhere
modifications with finite exceptional sets, and the escaping-dimension
step family.  Each form knows how to evaluate itself, take a pointwise
modulus where that stays inside the catalog, and integrate itself in
closed form where an antiderivative exists.
"""

from __future__ import annotations

import abc
import math
from bisect import bisect_right
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import polyroots
from .errors import (
    DimensionMismatchError,
    MonotonicityError,
    UnsupportedFormError,
)
from .lattice import LatticeVector
from .partitions import Interval
from .scalars import FLOAT, RATIONAL, Scalar, as_scalar, format_scalar, parse_scalar

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# component expressions
# ---------------------------------------------------------------------------


class Expr(abc.ABC):
    """A scalar-valued closed-form expression on [0,1]."""

    backend: str

    @abc.abstractmethod
    def eval(self, t: Fraction) -> Scalar: ...

    @abc.abstractmethod
    def integral(self, a: Fraction, b: Fraction) -> Scalar: ...

    @abc.abstractmethod
    def total_variation(self) -> Scalar: ...

    @abc.abstractmethod
    def bound_abs(self) -> Scalar: ...

    @abc.abstractmethod
    def negated(self) -> "Expr": ...

    def sign_cells(self, a: Fraction, b: Fraction) -> List[Tuple[Fraction, Fraction, int]]:
        """(lo, hi, sign) cells on which the expression keeps one sign."""
        raise UnsupportedFormError(f"{type(self).__name__} has no exact sign decomposition")

    @abc.abstractmethod
    def to_json(self) -> dict: ...


class PolyExpr(Expr):
    """Polynomial c0 + c1 t + ... with rational (exact) coefficients."""

    def __init__(self, coeffs: Sequence):
        self.coeffs = polyroots.trim([Fraction(c) for c in coeffs]) or (ZERO,)
        self.backend = RATIONAL

    def eval(self, t: Fraction) -> Fraction:
        return polyroots.evaluate(self.coeffs, Fraction(t))

    def integral(self, a: Fraction, b: Fraction) -> Fraction:
        anti = polyroots.antiderivative(self.coeffs)
        return polyroots.evaluate(anti, Fraction(b)) - polyroots.evaluate(anti, Fraction(a))

    def total_variation(self) -> Fraction:
        """Exact variation on [0,1] via the sign cells of the derivative."""
        deriv = polyroots.derivative(self.coeffs)
        cells = polyroots.sign_decomposition(deriv, ZERO, ONE)
        cuts = [ZERO] + [hi for _, hi, _ in cells[:-1]] + [ONE]
        return sum(
            (abs(self.eval(y) - self.eval(x)) for x, y in zip(cuts, cuts[1:])),
            start=ZERO,
        )

    def bound_abs(self) -> Fraction:
        # coefficient-sum majorant, valid on [0,1]
        return sum((abs(c) for c in self.coeffs), start=ZERO)

    def negated(self) -> "PolyExpr":
        return PolyExpr([-c for c in self.coeffs])

    def sign_cells(self, a: Fraction, b: Fraction):
        return polyroots.sign_decomposition(self.coeffs, a, b)

    def to_json(self) -> dict:
        return {"kind": "poly", "coeffs": [format_scalar(c) for c in self.coeffs]}

    def __repr__(self):
        return f"PolyExpr({[str(c) for c in self.coeffs]})"


class TrigExpr(Expr):
    """shift + scale * sin(freq t) or shift + scale * cos(freq t); float."""

    def __init__(self, kind: str, shift: float, scale: float, freq: float):
        if kind not in ("sin", "cos"):
            raise ValueError("trig kind must be sin or cos")
        if freq == 0:
            raise ValueError("zero frequency; use a constant polynomial instead")
        self.kind = kind
        self.shift = float(shift)
        self.scale = float(scale)
        self.freq = float(freq)
        self.backend = FLOAT

    def _osc(self, x: float) -> float:
        return math.sin(self.freq * x) if self.kind == "sin" else math.cos(self.freq * x)

    def eval(self, t) -> float:
        return self.shift + self.scale * self._osc(float(t))

    def integral(self, a, b) -> float:
        a, b = float(a), float(b)
        if self.kind == "sin":
            anti = lambda x: -self.scale * math.cos(self.freq * x) / self.freq
        else:
            anti = lambda x: self.scale * math.sin(self.freq * x) / self.freq
        return self.shift * (b - a) + anti(b) - anti(a)

    def _critical_points(self) -> List[float]:
        # zeros of the derivative inside (0,1)
        out = []
        k = 0
        while True:
            if self.kind == "sin":
                t = (math.pi / 2 + k * math.pi) / self.freq
            else:
                t = (k * math.pi) / self.freq if k > 0 else None
            if t is None:
                k += 1
                continue
            if t >= 1:
                break
            if t > 0:
                out.append(t)
            k += 1
        return out

    def total_variation(self) -> float:
        pts = [0.0] + self._critical_points() + [1.0]
        return sum(abs(self.eval(y) - self.eval(x)) for x, y in zip(pts, pts[1:]))

    def bound_abs(self) -> float:
        return abs(self.shift) + abs(self.scale)

    def negated(self) -> "TrigExpr":
        return TrigExpr(self.kind, -self.shift, -self.scale, self.freq)

    def sign_cells(self, a, b):
        return _sampled_sign_cell(self, a, b)

    def to_json(self) -> dict:
        return {"kind": self.kind, "shift": self.shift, "scale": self.scale, "freq": self.freq}

    def __repr__(self):
        return f"TrigExpr({self.shift} + {self.scale}*{self.kind}({self.freq} t))"


class ExpExpr(Expr):
    """shift + scale * exp(rate t); float backend, monotone in t."""

    def __init__(self, shift: float, scale: float, rate: float):
        if rate == 0:
            raise ValueError("zero rate; use a constant polynomial instead")
        self.shift = float(shift)
        self.scale = float(scale)
        self.rate = float(rate)
        self.backend = FLOAT

    def eval(self, t) -> float:
        return self.shift + self.scale * math.exp(self.rate * float(t))

    def integral(self, a, b) -> float:
        a, b = float(a), float(b)
        return self.shift * (b - a) + self.scale * (
            math.exp(self.rate * b) - math.exp(self.rate * a)
        ) / self.rate

    def total_variation(self) -> float:
        return abs(self.eval(1.0) - self.eval(0.0))

    def bound_abs(self) -> float:
        return max(abs(self.eval(0.0)), abs(self.eval(1.0)))

    def negated(self) -> "ExpExpr":
        return ExpExpr(-self.shift, -self.scale, self.rate)

    def sign_cells(self, a, b):
        return _sampled_sign_cell(self, a, b)

    def to_json(self) -> dict:
        return {"kind": "exp", "shift": self.shift, "scale": self.scale, "rate": self.rate}


def _sampled_sign_cell(expr: Expr, a: Fraction, b: Fraction):
    """Single constant-sign cell for expressions checked by sampling.

    Valid for the float catalog members, whose sign changes would be
    irrational anyway; a detected mixed sign raises.
    """
    a, b = Fraction(a), Fraction(b)
    samples = [a + (b - a) * Fraction(j, 128) for j in range(129)]
    vals = [expr.eval(t) for t in samples]
    has_pos = any(v > 1e-15 for v in vals)
    has_neg = any(v < -1e-15 for v in vals)
    if has_pos and has_neg:
        raise UnsupportedFormError("sampled sign change; modulus not representable exactly")
    sign = 1 if has_pos else (-1 if has_neg else 0)
    return [(a, b, sign)]


def expr_from_json(d: dict) -> Expr:
    kind = d["kind"]
    if kind == "poly":
        return PolyExpr([parse_scalar(c) if isinstance(c, str) else as_scalar(c) for c in d["coeffs"]])
    if kind in ("sin", "cos"):
        return TrigExpr(kind, d["shift"], d["scale"], d["freq"])
    if kind == "exp":
        return ExpExpr(d["shift"], d["scale"], d["rate"])
    raise UnsupportedFormError(f"unknown expression kind {kind!r}")


def poly(*coeffs) -> PolyExpr:
    return PolyExpr(coeffs)


def const(c) -> PolyExpr:
    return PolyExpr([c])


# ---------------------------------------------------------------------------
# function forms
# ---------------------------------------------------------------------------


class LatticeFunction(abc.ABC):
    """A function [0,1] -> R^d with componentwise lattice order."""

    name: str
    dim: int
    backend: str

    @abc.abstractmethod
    def evaluate(self, t) -> LatticeVector: ...

    def __call__(self, t) -> LatticeVector:
        return self.evaluate(t)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        """Interior structure points (piece boundaries)."""
        return ()

    @property
    def supports_exact_integral(self) -> bool:
        return False

    def exact_integral(self, a: Fraction, b: Fraction) -> LatticeVector:
        raise UnsupportedFormError(f"{self.name}: no closed-form integral")

    def modulus(self) -> "LatticeFunction":
        raise UnsupportedFormError(f"{self.name}: modulus outside the form catalog")

    def bound_abs(self) -> LatticeVector:
        raise UnsupportedFormError(f"{self.name}: no simple majorant")

    def total_variation(self) -> LatticeVector:
        raise UnsupportedFormError(f"{self.name}: total variation unavailable")

    @property
    def is_monotone(self) -> bool:
        return False

    @property
    def is_step(self) -> bool:
        return False

    @abc.abstractmethod
    def to_json(self) -> dict: ...

    def _check_t(self, t) -> Fraction:
        if isinstance(t, float):
            t = Fraction(t)
        t = Fraction(t)
        if not (ZERO <= t <= ONE):
            raise ValueError(f"argument {t} outside [0,1]")
        return t

    def _pack(self, raw: List[Scalar]) -> LatticeVector:
        if self.backend == FLOAT:
            return LatticeVector([float(v) for v in raw])
        return LatticeVector(raw)


class StepFunction(LatticeFunction):
    """Constant on finitely many pieces [c_i, c_{i+1}); exact everywhere."""

    def __init__(self, breakpoints: Sequence, values: Sequence[LatticeVector], name: str = "step"):
        bps = tuple(Fraction(x) for x in breakpoints)
        if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(x >= y for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        vals = tuple(values)
        if len(vals) != len(bps) - 1:
            raise ValueError("need one value per piece")
        dims = {v.dim for v in vals}
        if len(dims) != 1:
            raise DimensionMismatchError("piece values of mixed dimension")
        backends = {v.backend for v in vals}
        if len(backends) != 1:
            raise ValueError("piece values of mixed backend")
        self.bps = bps
        self.values = vals
        self.name = name
        self.dim = vals[0].dim
        self.backend = vals[0].backend

    def evaluate(self, t) -> LatticeVector:
        t = self._check_t(t)
        i = bisect_right(self.bps, t) - 1
        if i >= len(self.values):  # t == 1
            i = len(self.values) - 1
        return self.values[i]

    def breakpoints(self) -> Tuple[Fraction, ...]:
        return self.bps[1:-1]

    @property
    def supports_exact_integral(self) -> bool:
        return True

    def exact_integral(self, a: Fraction, b: Fraction) -> LatticeVector:
        a, b = Fraction(a), Fraction(b)
        if not (ZERO <= a <= b <= ONE):
            raise ValueError(f"bad integration range [{a}, {b}]")
        total = LatticeVector.zeros(self.dim, self.backend)
        if a == b:
            return total
        for i, v in enumerate(self.values):
            lo, hi = max(self.bps[i], a), min(self.bps[i + 1], b)
            if lo < hi:
                total = total + v.scale_length(hi - lo)
        return total

    def modulus(self) -> "StepFunction":
        return StepFunction(self.bps, [abs(v) for v in self.values], name=f"|{self.name}|")

    def bound_abs(self) -> LatticeVector:
        out = abs(self.values[0])
        for v in self.values[1:]:
            out = out.join(abs(v))
        return out

    def total_variation(self) -> LatticeVector:
        tv = LatticeVector.zeros(self.dim, self.backend)
        for u, v in zip(self.values, self.values[1:]):
            tv = tv + abs(v - u)
        return tv

    def jumps(self) -> List[Tuple[Fraction, LatticeVector]]:
        """Interior breakpoints with componentwise jump magnitudes."""
        return [
            (c, abs(v - u))
            for c, u, v in zip(self.bps[1:-1], self.values, self.values[1:])
        ]

    def min_gap(self) -> Fraction:
        """Minimal distance between consecutive interior breakpoints
        (1 when fewer than two)."""
        inner = self.bps[1:-1]
        if len(inner) < 2:
            return ONE
        return min(y - x for x, y in zip(inner, inner[1:]))

    @property
    def is_monotone(self) -> bool:
        return all(u.le(v) for u, v in zip(self.values, self.values[1:]))

    @property
    def is_step(self) -> bool:
        return True

    def to_float_backend(self) -> "StepFunction":
        return StepFunction(self.bps, [v.to_float() for v in self.values], name=self.name)

    def to_json(self) -> dict:
        return {
            "id": self.name,
            "form": "step",
            "breakpoints": [format_scalar(x) for x in self.bps],
            "values": [v.to_json() for v in self.values],
        }


class PiecewiseFunction(LatticeFunction):
    """Closed-form expressions per piece and component.

    The scalar backend is rational exactly when every component is a
    rational polynomial; any trig or exp component makes the whole
    function float-backed (rational sub-results are converted at the
    vector boundary, never mixed inside one).
    """

    def __init__(
        self,
        breakpoints: Sequence,
        pieces: Sequence[Sequence[Expr]],
        name: str = "piecewise",
        monotone: bool = False,
        force_float: bool = False,
    ):
        bps = tuple(Fraction(x) for x in breakpoints)
        if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(x >= y for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        pcs = tuple(tuple(p) for p in pieces)
        if len(pcs) != len(bps) - 1:
            raise ValueError("need one expression tuple per piece")
        dims = {len(p) for p in pcs}
        if len(dims) != 1:
            raise DimensionMismatchError("pieces of mixed dimension")
        self.bps = bps
        self.pieces = pcs
        self.name = name
        self.dim = len(pcs[0])
        self.backend = (
            RATIONAL
            if not force_float and all(e.backend == RATIONAL for p in pcs for e in p)
            else FLOAT
        )
        self._force_float = force_float
        self._monotone = monotone
        if monotone:
            self._spot_check_monotone()

    @staticmethod
    def smooth(name: str, exprs: Sequence[Expr], monotone: bool = False) -> "PiecewiseFunction":
        """Single-piece convenience constructor."""
        return PiecewiseFunction((ZERO, ONE), (tuple(exprs),), name=name, monotone=monotone)

    def _piece_index(self, t: Fraction) -> int:
        i = bisect_right(self.bps, t) - 1
        return min(i, len(self.pieces) - 1)

    def evaluate(self, t) -> LatticeVector:
        t = self._check_t(t)
        exprs = self.pieces[self._piece_index(t)]
        return self._pack([e.eval(t) for e in exprs])

    def breakpoints(self) -> Tuple[Fraction, ...]:
        return self.bps[1:-1]

    @property
    def supports_exact_integral(self) -> bool:
        return True

    def exact_integral(self, a: Fraction, b: Fraction) -> LatticeVector:
        a, b = Fraction(a), Fraction(b)
        if not (ZERO <= a <= b <= ONE):
            raise ValueError(f"bad integration range [{a}, {b}]")
        raw: List[Scalar] = [ZERO] * self.dim if self.backend == RATIONAL else [0.0] * self.dim
        for i, exprs in enumerate(self.pieces):
            lo, hi = max(self.bps[i], a), min(self.bps[i + 1], b)
            if lo < hi:
                for j, e in enumerate(exprs):
                    v = e.integral(lo, hi)
                    raw[j] = raw[j] + (float(v) if self.backend == FLOAT else v)
        return self._pack(raw)

    def modulus(self) -> "PiecewiseFunction":
        """Pointwise |f|: refine pieces at sign changes, flip signs.

        Requires every component's sign changes to be locatable exactly;
        raises UnsupportedFormError otherwise.
        """
        cuts = set(self.bps)
        signs_per_piece: List[List[List[Tuple[Fraction, Fraction, int]]]] = []
        for i, exprs in enumerate(self.pieces):
            lo, hi = self.bps[i], self.bps[i + 1]
            per_comp = [e.sign_cells(lo, hi) for e in exprs]
            signs_per_piece.append(per_comp)
            for cells in per_comp:
                for _, cell_hi, _ in cells[:-1]:
                    cuts.add(cell_hi)
        new_bps = sorted(cuts)
        new_pieces = []
        for lo, hi in zip(new_bps, new_bps[1:]):
            mid = (lo + hi) / 2
            i = self._piece_index(mid)
            exprs = self.pieces[i]
            row = []
            for j, e in enumerate(exprs):
                sign = next(s for (clo, chi, s) in signs_per_piece[i][j] if clo <= mid <= chi)
                row.append(e.negated() if sign < 0 else e)
            new_pieces.append(tuple(row))
        return PiecewiseFunction(new_bps, new_pieces, name=f"|{self.name}|")

    def bound_abs(self) -> LatticeVector:
        raw = None
        for exprs in self.pieces:
            v = self._pack([e.bound_abs() for e in exprs])
            raw = v if raw is None else raw.join(v)
        return raw

    def total_variation(self) -> LatticeVector:
        """Componentwise variation: per-piece variation plus junction jumps."""
        raw: List[Scalar] = [ZERO] * self.dim if self.backend == RATIONAL else [0.0] * self.dim
        for i, exprs in enumerate(self.pieces):
            lo, hi = self.bps[i], self.bps[i + 1]
            for j, e in enumerate(exprs):
                tv = _piece_variation(e, lo, hi)
                raw[j] = raw[j] + (float(tv) if self.backend == FLOAT else tv)
        for i in range(1, len(self.pieces)):
            c = self.bps[i]
            left = self.pieces[i - 1]
            right = self.pieces[i]
            for j in range(self.dim):
                jump = abs(right[j].eval(c) - left[j].eval(c))
                raw[j] = raw[j] + (float(jump) if self.backend == FLOAT else jump)
        return self._pack(raw)

    def _spot_check_monotone(self, samples: int = 64) -> None:
        prev = None
        for k in range(samples + 1):
            t = Fraction(k, samples)
            v = self.evaluate(t)
            if prev is not None and not prev.le(v):
                raise MonotonicityError(f"{self.name}: not nondecreasing near t={t}")
            prev = v

    @property
    def is_monotone(self) -> bool:
        return self._monotone

    def to_float_backend(self) -> "PiecewiseFunction":
        # float conversion happens at evaluation; only the flag changes
        return PiecewiseFunction(
            self.bps, self.pieces, name=self.name, monotone=self._monotone, force_float=True
        )

    def to_json(self) -> dict:
        return {
            "id": self.name,
            "form": "piecewise",
            "monotone": self._monotone,
            "breakpoints": [format_scalar(x) for x in self.bps],
            "pieces": [[e.to_json() for e in p] for p in self.pieces],
        }


def _piece_variation(e: Expr, lo: Fraction, hi: Fraction) -> Scalar:
    """Variation of one expression over one piece.

    Uses the global [0,1] variation helpers restricted by evaluation; for
    polynomials this calls the exact machinery on the sub-interval.
    """
    if isinstance(e, PolyExpr):
        deriv = polyroots.derivative(e.coeffs)
        cells = polyroots.sign_decomposition(deriv, lo, hi)
        cuts = [lo] + [h for _, h, _ in cells[:-1]] + [hi]
        return sum((abs(e.eval(y) - e.eval(x)) for x, y in zip(cuts, cuts[1:])), start=ZERO)
    if isinstance(e, TrigExpr):
        pts = [float(lo)] + [t for t in e._critical_points() if float(lo) < t < float(hi)] + [float(hi)]
        return sum(abs(e.eval(y) - e.eval(x)) for x, y in zip(pts, pts[1:]))
    return abs(e.eval(hi) - e.eval(lo))  # exp: monotone


class AeModifiedFunction(LatticeFunction):
    """A base function modified on a finite exceptional set."""

    def __init__(self, base: LatticeFunction, exceptions: Sequence[Tuple], name: Optional[str] = None):
        self.base = base
        pts = []
        for p, v in exceptions:
            p = Fraction(p)
            if not (ZERO <= p <= ONE):
                raise ValueError(f"exceptional point {p} outside [0,1]")
            if v.dim != base.dim:
                raise DimensionMismatchError("replacement value of wrong dimension")
            v = v.to_float() if base.backend == FLOAT else v
            if v.backend != base.backend:
                raise ValueError("replacement backend must match the base")
            pts.append((p, v))
        pts.sort(key=lambda pv: pv[0])
        if len({p for p, _ in pts}) != len(pts):
            raise ValueError("duplicate exceptional points")
        self.exceptions = tuple(pts)
        self.name = name or f"{base.name}~ae{len(pts)}"
        self.dim = base.dim
        self.backend = base.backend

    def evaluate(self, t) -> LatticeVector:
        t = self._check_t(t)
        for p, v in self.exceptions:
            if p == t:
                return v
        return self.base.evaluate(t)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        return self.base.breakpoints()

    @property
    def supports_exact_integral(self) -> bool:
        return self.base.supports_exact_integral

    def exact_integral(self, a: Fraction, b: Fraction) -> LatticeVector:
        # a finite set is null: the integral is the base's
        return self.base.exact_integral(a, b)

    def modulus(self) -> "AeModifiedFunction":
        return AeModifiedFunction(
            self.base.modulus(),
            [(p, abs(v)) for p, v in self.exceptions],
            name=f"|{self.name}|",
        )

    def bound_abs(self) -> LatticeVector:
        out = self.base.bound_abs()
        for _, v in self.exceptions:
            out = out.join(abs(v))
        return out

    @property
    def is_step(self) -> bool:
        return False

    def to_float_backend(self) -> "AeModifiedFunction":
        return AeModifiedFunction(
            self.base.to_float_backend(),
            [(p, v.to_float()) for p, v in self.exceptions],
            name=self.name,
        )

    def to_json(self) -> dict:
        return {
            "id": self.name,
            "form": "ae_modified",
            "base": self.base.to_json(),
            "exceptions": [
                {"point": format_scalar(p), "value": v.to_json()} for p, v in self.exceptions
            ],
        }


def escaping_function(dim: int, scaled: bool = False, name: Optional[str] = None) -> StepFunction:
    """Step family whose k-th dyadic block hits the k-th unit vector.

    Block k (1-based) is [1 - 2^(1-k), 1 - 2^-k) and carries e_k, scaled
    by 2^k when ``scaled``; the final sliver [1 - 2^-d, 1] is zero.  As the
    dimension grows this family keeps its sup-order size while its L1
    variational size grows, which is what the dimension sweep measures.
    """
    if dim < 1:
        raise ValueError("dimension must be positive")
    bps = [ZERO]
    values = []
    for k in range(1, dim + 1):
        bps.append(ONE - Fraction(1, 2**k))
        e = [ZERO] * dim
        e[k - 1] = Fraction(2**k) if scaled else Fraction(1)
        values.append(LatticeVector(e))
    bps.append(ONE)
    values.append(LatticeVector.zeros(dim))
    label = name or (f"escaping_{dim}_scaled" if scaled else f"escaping_{dim}")
    return StepFunction(bps, values, name=label)


# ---------------------------------------------------------------------------
# module-level operation aliases and JSON round-trip
# ---------------------------------------------------------------------------


def evaluate(f: LatticeFunction, t) -> LatticeVector:
    return f.evaluate(t)


def modulus_fn(f: LatticeFunction) -> LatticeFunction:
    return f.modulus()


def exact_integral(f: LatticeFunction, interval: Interval) -> LatticeVector:
    return f.exact_integral(interval.a, interval.b)


def function_from_json(d: dict) -> LatticeFunction:
    form = d.get("form")
    name = d.get("id", form or "anonymous")
    if form == "step":
        return StepFunction(
            [parse_scalar(x) for x in d["breakpoints"]],
            [LatticeVector.from_json(v) for v in d["values"]],
            name=name,
        )
    if form == "piecewise":
        return PiecewiseFunction(
            [parse_scalar(x) for x in d["breakpoints"]],
            [[expr_from_json(e) for e in p] for p in d["pieces"]],
            name=name,
            monotone=bool(d.get("monotone", False)),
        )
    if form == "ae_modified":
        return AeModifiedFunction(
            function_from_json(d["base"]),
            [(parse_scalar(e["point"]), LatticeVector.from_json(e["value"])) for e in d["exceptions"]],
            name=name,
        )
    if form == "escaping":
        return escaping_function(int(d["dim"]), bool(d.get("scaled", False)), name=name)
    raise UnsupportedFormError(f"unknown function form {form!r}")
