import math
from fractions import Fraction

import pytest

from gaugeint.errors import MonotonicityError, NoConvergenceError, UnsupportedClassError
from gaugeint.functions import (
    AeModifiedFunction,
    PiecewiseFunction,
    StepFunction,
    TrigExpr,
    poly,
)
from gaugeint.integrate import (
    Bracket,
    CauchyGap,
    Exact,
    IndefiniteIntegral,
    indefinite,
    integrate_monotone,
    integrate_norm_adaptive,
    integrate_order,
    integrate_step,
    modulus_measure,
    modulus_profile,
)
from gaugeint.lattice import L1, SUP, LatticeVector, OSequence, Space
from gaugeint.partitions import Interval

F = Fraction


def vec(*xs):
    return LatticeVector([F(x) for x in xs])


def linear():
    return PiecewiseFunction.smooth("t", [poly(0, 1)], monotone=True)


class TestStep:
    def test_half_indicator(self):
        f = StepFunction((0, F(1, 2), 1), [vec(2), vec(0)])
        res = integrate_step(f)
        assert res.value == vec(1)
        assert isinstance(res.certificate, Exact)
        assert res.backend == "rational"

    def test_zero(self):
        res = integrate_step(StepFunction((0, 1), [vec(0)]))
        assert res.value == vec(0)

    def test_thirds(self):
        f = StepFunction((0, F(1, 3), F(2, 3), 1), [vec(1), vec(2), vec(3)])
        assert integrate_step(f).value == vec(2)

    def test_wrong_form(self):
        with pytest.raises(UnsupportedClassError):
            integrate_step(linear())


class TestMonotone:
    def test_linear_n2(self):
        res = integrate_monotone(linear(), 2)
        assert res.certificate.lower == vec(F(1, 4))
        assert res.certificate.upper == vec(F(3, 4))
        assert res.certificate.width == vec(F(1, 2))
        assert res.value == vec(F(1, 2))

    def test_bracket_width_law(self):
        f = PiecewiseFunction.smooth("t,t2", [poly(0, 1), poly(0, 0, 1)], monotone=True)
        delta = f.evaluate(F(1)) - f.evaluate(F(0))
        for n in (3, 10, 57):
            res = integrate_monotone(f, n)
            assert res.certificate.width == delta.scale(F(1, n))

    def test_bracket_contains_oracle(self):
        f = PiecewiseFunction.smooth("t,t2", [poly(0, 1), poly(0, 0, 1)], monotone=True)
        oracle = f.exact_integral(F(0), F(1))
        for n in (5, 50):
            cert = integrate_monotone(f, n).certificate
            assert cert.lower.le(oracle) and oracle.le(cert.upper)

    def test_converges_to_oracle(self):
        res = integrate_monotone(linear(), 1000)
        err = abs(res.value - vec(F(1, 2)))
        assert err.le(vec(F(1, 2000)))

    def test_vector_with_float_pieces(self):
        f = PiecewiseFunction.smooth(
            "t,t2", [poly(0, 1), poly(0, 0, 1)], monotone=True
        ).to_float_backend()
        res = integrate_monotone(f, 1000)
        assert res.value.entries[0] == pytest.approx(0.5, abs=1e-3)
        assert res.value.entries[1] == pytest.approx(1 / 3, abs=1e-3)

    def test_detects_violation(self):
        f = PiecewiseFunction.smooth("vee", [poly(F(1, 2), -1)])  # decreasing
        with pytest.raises(MonotonicityError):
            integrate_monotone(f, 8)


class TestNormAdaptive:
    def test_linear(self):
        res = integrate_norm_adaptive(linear(), Space(1, SUP), F(1, 10**6))
        assert abs(res.value - vec(F(1, 2))).le(vec(F(1, 10**5)))
        assert isinstance(res.certificate, CauchyGap)

    def test_step_exact_at_breakpoint_depth(self):
        f = StepFunction((0, F(1, 3), 1), [vec(3), vec(0)])
        res = integrate_norm_adaptive(f, Space(1, SUP), F(1, 10**9))
        assert res.value == vec(1)  # grid aligned with breakpoints: exact

    def test_sine(self):
        f = PiecewiseFunction.smooth("sin(pi t)", [TrigExpr("sin", 0.0, 1.0, math.pi)])
        res = integrate_norm_adaptive(f, Space(1, SUP), 1e-6)
        assert res.value.entries[0] == pytest.approx(2 / math.pi, abs=1e-5)

    def test_no_convergence_signal(self):
        f = PiecewiseFunction.smooth("sin(pi t)", [TrigExpr("sin", 0.0, 1.0, math.pi)])
        with pytest.raises(NoConvergenceError):
            integrate_norm_adaptive(f, Space(1, SUP), 1e-13, max_depth=3)


class TestOrder:
    def test_step_dispatch(self):
        f = StepFunction((0, F(1, 2), 1), [vec(2), vec(0)])
        res = integrate_order(f, OSequence.harmonic(vec(1)), 5)
        assert res.value == integrate_step(f).value
        assert isinstance(res.certificate, Exact)

    def test_monotone_certified_within_bn(self):
        seq = OSequence.harmonic(vec(1))
        res = integrate_order(linear(), seq, 10)
        assert res.partitions_used == 10
        assert res.certificate.width.le(seq(10))
        assert res.value == vec(F(1, 2))

    def test_ae_modified_bound(self):
        base = StepFunction((0, 1), [vec(0)])
        g = AeModifiedFunction(base, [(F(1, 2), vec(5))])
        res = integrate_order(g, OSequence.harmonic(vec(1)), 10)
        assert res.value == vec(0)
        assert res.certificate.gap == vec(1)  # 2 * 5 / 10

    def test_unsupported(self):
        f = PiecewiseFunction.smooth("dip", [poly(F(2, 9), -1, 1)])
        with pytest.raises(UnsupportedClassError):
            integrate_order(f, OSequence.harmonic(vec(1)), 3)


class TestIndefinite:
    def test_linear_prefix(self):
        mu = indefinite(linear())
        assert mu.query((F(0), F(1, 2))) == vec(F(1, 8))

    def test_additive_split(self):
        mu = indefinite(linear())
        a = mu.query(Interval(F(0), F(1, 3)))
        b = mu.query(Interval(F(1, 3), F(1)))
        assert a + b == mu.query(Interval(F(0), F(1)))

    def test_union_query(self):
        f = StepFunction((0, F(1, 2), 1), [vec(1), vec(0)])
        mu = indefinite(f)
        got = mu.query([Interval(F(1, 4), F(1, 2)), Interval(F(1, 2), F(3, 4))])
        assert got == vec(F(1, 4))

    def test_rejects_overlap(self):
        mu = indefinite(linear())
        with pytest.raises(ValueError):
            mu.query([Interval(F(0), F(1, 2)), Interval(F(1, 4), F(3, 4))])

    def test_method_tag(self):
        mu = indefinite(linear())
        assert mu.method_for(F(0), F(1, 2)) == "exact"


class TestModulusMeasure:
    def test_signflip_linear(self):
        mu = indefinite(PiecewiseFunction.smooth("t-1/2", [poly(F(-1, 2), 1)]))
        got = modulus_measure(mu, depth=1)
        assert got == vec(F(1, 4))

    def test_nonnegative_depth0(self):
        f = PiecewiseFunction.smooth("t2", [poly(0, 0, 1)])
        mu = indefinite(f)
        assert modulus_measure(mu, depth=0) == vec(F(1, 3))

    def test_profile_monotone_in_depth(self):
        f = PiecewiseFunction.smooth("cubic", [poly(F(-1, 8), F(3, 4), F(-3, 2), 1)])
        mu = indefinite(f)
        prof = modulus_profile(mu, depth=6)
        for lo, hi in zip(prof, prof[1:]):
            assert lo.le(hi)

    def test_bounded_by_oracle_with_tiny_gap(self):
        f = PiecewiseFunction.smooth("(t-1/3)(t-2/3)", [poly(F(2, 9), -1, 1)])
        mu = indefinite(f)
        oracle = f.modulus().exact_integral(F(0), F(1))
        got = modulus_measure(mu, depth=6)
        assert got.le(oracle)
        gap = oracle - got
        assert gap.le(vec(F(1, 10**6)))

    def test_subinterval(self):
        mu = indefinite(PiecewiseFunction.smooth("t-1/2", [poly(F(-1, 2), 1)]))
        got = modulus_measure(mu, a=F(0), b=F(1, 2), depth=3)
        assert got == vec(F(1, 8))
