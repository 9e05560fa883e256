"""Finite-dimensional Banach-lattice value spaces.

Vectors in R^d carry the componentwise lattice order.  All values are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import BackendMismatchError, DimensionMismatchError
from .scalars import (
    FLOAT,
    RATIONAL,
    Scalar,
    as_scalar,
    backend_of,
    ceil_div,
    check_same_backend,
    format_scalar,
    parse_scalar,
    scalar_sqrt,
)


class LatticeVector:
    """Element of R^d with componentwise order.

    Entries are homogeneous: all exact Fractions or all floats.  Ints are
    normalized to Fractions.  Mixing backends raises.
    """

    __slots__ = ("entries", "backend")

    def __init__(self, entries: Iterable):
        items = tuple(as_scalar(e) for e in entries)
        if not items:
            raise ValueError("vector must have positive dimension")
        backend = backend_of(items[0])
        for e in items[1:]:
            check_same_backend(backend, backend_of(e))
        object.__setattr__(self, "entries", items)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("LatticeVector is immutable")

    @property
    def dim(self) -> int:
        return len(self.entries)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(dim: int, backend: str = RATIONAL) -> "LatticeVector":
        zero = Fraction(0) if backend == RATIONAL else 0.0
        return LatticeVector([zero] * dim)

    @staticmethod
    def ones(dim: int, backend: str = RATIONAL) -> "LatticeVector":
        one = Fraction(1) if backend == RATIONAL else 1.0
        return LatticeVector([one] * dim)

    @staticmethod
    def unit(dim: int, j: int, backend: str = RATIONAL) -> "LatticeVector":
        v = [Fraction(0) if backend == RATIONAL else 0.0] * dim
        v[j] = Fraction(1) if backend == RATIONAL else 1.0
        return LatticeVector(v)

    # -- arithmetic ----------------------------------------------------

    def _match(self, other: "LatticeVector") -> None:
        if not isinstance(other, LatticeVector):
            raise TypeError(f"expected LatticeVector, got {type(other)}")
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dim {self.dim} vs {other.dim}")
        check_same_backend(self.backend, other.backend)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._match(other)
        return LatticeVector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._match(other)
        return LatticeVector([a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "LatticeVector":
        return LatticeVector([-a for a in self.entries])

    def scale(self, s: Scalar) -> "LatticeVector":
        s = as_scalar(s)
        check_same_backend(self.backend, backend_of(s))
        return LatticeVector([a * s for a in self.entries])

    def scale_length(self, length: Fraction) -> "LatticeVector":
        """Multiply by an interval length, converting the (always rational)
        length to this vector's backend first."""
        s = length if self.backend == RATIONAL else float(length)
        return LatticeVector([a * s for a in self.entries])

    # -- lattice structure ----------------------------------------------

    def join(self, other: "LatticeVector") -> "LatticeVector":
        self._match(other)
        return LatticeVector([max(a, b) for a, b in zip(self.entries, other.entries)])

    def meet(self, other: "LatticeVector") -> "LatticeVector":
        self._match(other)
        return LatticeVector([min(a, b) for a, b in zip(self.entries, other.entries)])

    def __abs__(self) -> "LatticeVector":
        return LatticeVector([abs(a) for a in self.entries])

    def le(self, other: "LatticeVector") -> bool:
        """Componentwise <= (the lattice partial order)."""
        self._match(other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __le__(self, other: "LatticeVector") -> bool:
        return self.le(other)

    def __ge__(self, other: "LatticeVector") -> bool:
        return other.le(self)

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for a in self.entries)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LatticeVector)
            and self.dim == other.dim
            and self.backend == other.backend
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.backend, self.entries))

    def __repr__(self):
        return f"LatticeVector(({', '.join(format_scalar(e) for e in self.entries)}))"

    # -- conversions -----------------------------------------------------

    def to_float(self) -> "LatticeVector":
        return LatticeVector([float(a) for a in self.entries])

    def max_entry(self) -> Scalar:
        return max(self.entries)

    def to_json(self) -> list:
        return [format_scalar(e) for e in self.entries]

    @staticmethod
    def from_json(data: list) -> "LatticeVector":
        return LatticeVector([parse_scalar(s) if isinstance(s, str) else as_scalar(s) for s in data])


# Module-level aliases for the lattice operations.

def join(x: LatticeVector, y: LatticeVector) -> LatticeVector:
    return x.join(y)


def meet(x: LatticeVector, y: LatticeVector) -> LatticeVector:
    return x.meet(y)


def modulus(x: LatticeVector) -> LatticeVector:
    """|x| = x v (-x), componentwise absolute value."""
    return abs(x)


L1 = "l1"
SUP = "sup"
EUCLID = "euclid"
_NORM_KINDS = (L1, SUP, EUCLID)


@dataclass(frozen=True)
class Space:
    """A value space: dimension plus a lattice-compatible norm.

    The L1 norm is additive on positive elements; the sup norm satisfies
    norm(x v y) = max(norm x, norm y) for x, y >= 0.  The Euclidean norm is
    always evaluated in float (square roots leave the rationals).
    """

    dim: int
    norm_kind: str

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.norm_kind not in _NORM_KINDS:
            raise ValueError(f"norm_kind must be one of {_NORM_KINDS}")

    def norm(self, x: LatticeVector) -> Scalar:
        if x.dim != self.dim:
            raise DimensionMismatchError(f"vector dim {x.dim} vs space dim {self.dim}")
        if self.norm_kind == L1:
            return sum((abs(e) for e in x.entries), start=Fraction(0) if x.backend == RATIONAL else 0.0)
        if self.norm_kind == SUP:
            return max(abs(e) for e in x.entries)
        return scalar_sqrt(sum(e * e for e in x.entries))


def norm(space: Space, x: LatticeVector) -> Scalar:
    return space.norm(x)


HARMONIC = "harmonic"
GEOMETRIC = "geometric"


@dataclass(frozen=True)
class OSequence:
    """A decreasing positive vector sequence with infimum 0.

    Restricted to two rule forms, both decreasing by construction:
    ``c/n`` (harmonic) and ``c * r^n`` with 0 < r < 1 (geometric), c > 0.
    """

    kind: str
    c: LatticeVector
    ratio: Optional[Fraction] = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in (HARMONIC, GEOMETRIC):
            raise ValueError(f"unknown o-sequence rule {self.kind!r}")
        if not all(e > 0 for e in self.c.entries):
            raise ValueError("o-sequence scale c must be strictly positive")
        if self.kind == GEOMETRIC:
            if self.ratio is None or not (0 < self.ratio < 1):
                raise ValueError("geometric rule needs ratio 0 < r < 1")
        if not self.description:
            desc = (
                f"c/n, c={self.c!r}"
                if self.kind == HARMONIC
                else f"c*r^n, c={self.c!r}, r={self.ratio}"
            )
            object.__setattr__(self, "description", desc)

    @staticmethod
    def harmonic(c: LatticeVector) -> "OSequence":
        return OSequence(HARMONIC, c)

    @staticmethod
    def geometric(c: LatticeVector, ratio: Fraction) -> "OSequence":
        return OSequence(GEOMETRIC, c, ratio)

    def __call__(self, n: int) -> LatticeVector:
        if n < 1:
            raise ValueError(f"o-sequence index must be >= 1, got {n}")
        if self.kind == HARMONIC:
            factor = Fraction(1, n)
        else:
            factor = self.ratio**n
        if self.c.backend == FLOAT:
            return self.c.scale(float(factor))
        return self.c.scale(factor)

    def scaled(self, factor) -> "OSequence":
        f = as_scalar(factor)
        c = self.c.scale(f if self.c.backend == RATIONAL else float(f))
        return OSequence(self.kind, c, self.ratio)

    def _below(self, n: int, tol: LatticeVector) -> bool:
        b = self(n)
        if b.backend == tol.backend:
            return b.le(tol)
        return all(float(x) <= float(t) for x, t in zip(b.entries, tol.entries))

    def _smallest_index(self, pred) -> int:
        if pred(1):
            return 1
        n = 1
        while not pred(n):
            n *= 2
            if n > 10**9:
                raise ValueError("tolerance not reached at any feasible index")
        lo, hi = n // 2, n
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if pred(mid):
                hi = mid
            else:
                lo = mid
        return hi

    def index_reaching(self, tol: LatticeVector) -> int:
        """Smallest n with b_n <= tol componentwise."""
        if self.c.dim != tol.dim:
            raise DimensionMismatchError(f"dim {self.c.dim} vs {tol.dim}")
        if not all(e > 0 for e in tol.entries):
            raise ValueError("tolerance must be strictly positive")
        if self.kind == HARMONIC:
            worst = 1
            for c, t in zip(self.c.entries, tol.entries):
                if isinstance(c, float) or isinstance(t, float):
                    worst = max(worst, ceil_div(float(c) / float(t)))
                else:
                    worst = max(worst, ceil_div(c / t))
            return worst
        return self._smallest_index(lambda n: self._below(n, tol))

    def index_norm_below(self, space: Space, eps: Scalar) -> int:
        """Smallest n with ||b_n|| <= eps."""
        eps = as_scalar(eps)

        def ok(n: int) -> bool:
            val = space.norm(self(n))
            if backend_of(val) == backend_of(eps):
                return val <= eps
            return float(val) <= float(eps)

        return self._smallest_index(ok)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "c": self.c.to_json()}
        if self.ratio is not None:
            out["ratio"] = format_scalar(self.ratio)
        return out

    @staticmethod
    def from_json(data: dict) -> "OSequence":
        ratio = parse_scalar(data["ratio"]) if "ratio" in data else None
        return OSequence(data["kind"], LatticeVector.from_json(data["c"]), ratio)


def osequence_eval(seq: OSequence, n: int) -> LatticeVector:
    return seq(n)
