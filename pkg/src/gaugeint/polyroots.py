"""Exact root analysis for polynomials with rational coefficients.

Polynomials are coefficient tuples (c0, c1, ..., ck), lowest degree first,
all Fractions.  Provides Sturm-chain real-root counting, rational-root
extraction with multiplicities, and the sign decomposition of a polynomial
over a rational interval, all in exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

from .errors import UnsupportedFormError

Poly = Tuple[Fraction, ...]


def trim(p: Sequence[Fraction]) -> Poly:
    coeffs = list(p)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return trim([c * k for k, c in enumerate(p)][1:]) or (Fraction(0),)


def antiderivative(p: Poly) -> Poly:
    return (Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(p))


def divmod_poly(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    num, den = trim(num), trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    r = list(num)
    dlead = den[-1]
    while len(r) >= len(den) and trim(r):
        shift = len(r) - len(den)
        factor = r[-1] / dlead
        q[shift] = factor
        for i, c in enumerate(den):
            r[shift + i] -= factor * c
        r.pop()
    return trim(q) or (Fraction(0),), trim(r) or (Fraction(0),)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b and any(c != 0 for c in b):
        _, r = divmod_poly(a, b)
        a, b = b, trim(r)
    if not a:
        return (Fraction(0),)
    return tuple(c / a[-1] for c in a)  # monic


def squarefree(p: Poly) -> Poly:
    p = trim(p)
    if degree(p) < 1:
        return p
    g = poly_gcd(p, derivative(p))
    if degree(g) < 1:
        return p
    q, _ = divmod_poly(p, g)
    return q


def poly_mul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return trim(out) or (Fraction(0),)


def poly_sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    pad = lambda p: tuple(p) + (Fraction(0),) * (n - len(p))
    return trim(tuple(x - y for x, y in zip(pad(a), pad(b)))) or (Fraction(0),)


def squarefree_decomposition(p: Poly) -> List[Tuple[Poly, int]]:
    """Yun's algorithm: factors (g_i, i) with p = const * prod g_i^i."""
    p = trim(p)
    if degree(p) < 1:
        return []
    g = poly_gcd(p, derivative(p))
    if degree(g) < 1:
        return [(p, 1)]
    w, _ = divmod_poly(p, g)
    y, _ = divmod_poly(derivative(p), g)
    z = poly_sub(y, derivative(w))
    out = []
    i = 1
    while degree(w) > 0:
        gi = poly_gcd(w, z)
        if degree(gi) > 0:
            out.append((gi, i))
            w, _ = divmod_poly(w, gi)
            y, _ = divmod_poly(z, gi)
        else:
            y = z
        z = poly_sub(y, derivative(w))
        i += 1
    return out


def odd_multiplicity_part(p: Poly) -> Poly:
    """Product of the squarefree factors with odd multiplicity: the
    polynomial whose real roots are exactly where p changes sign."""
    out = (Fraction(1),)
    for g, mult in squarefree_decomposition(p):
        if mult % 2 == 1:
            out = poly_mul(out, g)
    return out


def _sign_variations(values: List[Fraction]) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_chain(p: Poly) -> List[Poly]:
    chain = [trim(p), derivative(p)]
    while degree(chain[-1]) > 0:
        _, r = divmod_poly(chain[-2], chain[-1])
        r = trim(r)
        if not r or all(c == 0 for c in r):
            break
        chain.append(tuple(-c for c in r))
    return chain


def count_real_roots(p: Poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of p in the open interval (a, b).

    Endpoint roots are divided out first so the Sturm count is clean.
    """
    p = squarefree(trim(p))
    if degree(p) < 1:
        return 0
    for endpoint in (a, b):
        while degree(p) >= 1 and evaluate(p, endpoint) == 0:
            p, _ = divmod_poly(p, (-endpoint, Fraction(1)))
    if degree(p) < 1:
        return 0
    chain = sturm_chain(p)
    va = _sign_variations([evaluate(q, a) for q in chain])
    vb = _sign_variations([evaluate(q, b) for q in chain])
    return va - vb


def _divisors(n: int) -> List[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def rational_roots(p: Poly, a: Fraction, b: Fraction) -> List[Tuple[Fraction, int]]:
    """Rational roots of p inside the open interval (a, b), with
    multiplicities, found by the rational-root theorem plus deflation."""
    p = trim(p)
    if degree(p) < 1:
        return []
    from math import lcm

    denom = lcm(*(c.denominator for c in p)) if len(p) > 1 else p[0].denominator
    ints = [int(c * denom) for c in p]
    while ints and ints[0] == 0:
        ints = ints[1:]  # factor out t; root 0 handled only if inside (a,b)
    roots: List[Tuple[Fraction, int]] = []
    if len(ints) < len(p):
        zero = Fraction(0)
        if a < zero < b:
            mult = len(p) - len(ints)
            roots.append((zero, mult))
    if not ints or len(ints) == 1:
        return sorted(roots)
    candidates = set()
    for pn in _divisors(ints[0]):
        for qd in _divisors(ints[-1]):
            if qd == 0:
                continue
            for sign in (1, -1):
                candidates.add(Fraction(sign * pn, qd))
    for r in sorted(candidates):
        if not (a < r < b):
            continue
        if evaluate(p, r) != 0:
            continue
        mult = 0
        q = p
        while evaluate(q, r) == 0 and degree(q) >= 1:
            q, rem = divmod_poly(q, (-r, Fraction(1)))
            assert all(c == 0 for c in rem)
            mult += 1
        roots.append((r, mult))
    return sorted(roots)


def sign_on(p: Poly, x: Fraction) -> int:
    v = evaluate(p, x)
    return (v > 0) - (v < 0)


def _sample_sign(p: Poly, lo: Fraction, hi: Fraction) -> int:
    """Sign of p on (lo, hi) where p has no sign change there; probes a few
    points to step over isolated zeros of even multiplicity."""
    k = 1
    while k < 64:
        for j in range(1, k + 1):
            x = lo + (hi - lo) * Fraction(2 * j - 1, 2 * k)
            s = sign_on(p, x)
            if s != 0:
                return s
        k *= 2
    return 0


def sign_decomposition(p: Poly, a: Fraction, b: Fraction) -> List[Tuple[Fraction, Fraction, int]]:
    """Split [a, b] at the sign changes of p into (lo, hi, sign) cells.

    Sign changes must occur at rational points; an irrational sign change
    (odd-multiplicity irrational root) makes |p| non-representable over
    rational breakpoints and raises UnsupportedFormError.
    """
    p = trim(p)
    if degree(p) < 1 or all(c == 0 for c in p[1:]):
        s = sign_on(p, (a + b) / 2) if p else 0
        return [(a, b, s)]
    rr = rational_roots(p, a, b)
    flips = [r for r, mult in rr if mult % 2 == 1]
    # sign flips happen exactly at roots of the odd-multiplicity part; all
    # of those inside (a, b) must be rational, or |p| leaves the catalog
    odd = odd_multiplicity_part(p)
    if count_real_roots(odd, a, b) != len(flips):
        raise UnsupportedFormError(
            "polynomial changes sign at an irrational point; "
            "its modulus is not representable over rational breakpoints"
        )
    cuts = [a] + flips + [b]
    cells = []
    for lo, hi in zip(cuts, cuts[1:]):
        cells.append((lo, hi, _sample_sign(p, lo, hi)))
    return cells
