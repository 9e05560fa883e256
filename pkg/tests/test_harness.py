import math
from fractions import Fraction

import pytest

from gaugeint.functions import (
    AeModifiedFunction,
    PiecewiseFunction,
    StepFunction,
    TrigExpr,
    escaping_function,
    poly,
)
from gaugeint.harness import (
    CheckReport,
    check_abs_integral,
    check_additivity,
    check_ae_equality,
    check_cauchy,
    check_henstock_lemma,
    check_modulus_identity,
    check_pointwise_sums,
    check_tag_swap,
    check_variational,
    default_osequence,
    dimension_sweep,
    run_default_suite,
)
from gaugeint.lattice import L1, LatticeVector, OSequence, Space

F = Fraction
HALF = F(1, 2)


def vec(*xs):
    return LatticeVector([F(x) for x in xs])


def step_2d():
    return StepFunction(
        (0, F(1, 3), F(2, 3), 1),
        [vec(2, 0), vec(0, 3), vec(-1, 1)],
        name="step_2d",
    )


def linear():
    return PiecewiseFunction.smooth("t", [poly(0, 1)], monotone=True)


def mono_pair():
    return PiecewiseFunction.smooth(
        "t,t2", [poly(0, 1), poly(0, 0, 1)], monotone=True
    )


def assert_passes(report: CheckReport):
    __tracebackhide__ = True
    assert not report.violated, report.witness
    assert report.worst_slack.is_nonnegative() or report.worst_slack.backend == "float"
    assert report.witness is None


class TestCauchy:
    @pytest.mark.parametrize("make", [step_2d, linear, mono_pair])
    def test_passes(self, make):
        assert_passes(check_cauchy(make(), n=6, trials=40, seed=1))

    def test_constant_function_full_slack(self):
        f = StepFunction((0, 1), [vec(4)], name="const")
        rep = check_cauchy(f, n=5, trials=10, seed=2)
        assert_passes(rep)
        # all sums equal: the slack is the whole bound
        assert rep.worst_slack.to_json() == rep.details["bound"]

    def test_signflip_poly(self):
        f = PiecewiseFunction.smooth("parabola", [poly(F(2, 9), -1, 1)])
        assert_passes(check_cauchy(f, n=4, trials=30, seed=3))

    def test_negative_control_violates(self):
        for make in (step_2d, linear):
            rep = check_cauchy(make(), n=8, trials=8, seed=4, bound_scale=HALF)
            assert rep.control and rep.violated
            assert rep.witness is not None
            assert "partition" in rep.witness

    def test_cross_discipline(self):
        rep = check_cauchy(step_2d(), n=6, trials=30, seed=5, discipline="cross")
        assert_passes(rep)
        assert rep.details["discipline"] == "cross"

    def test_witness_replays(self):
        from gaugeint.partitions import TaggedPartition, riemann_sum

        rep = check_cauchy(step_2d(), n=8, trials=8, seed=6, bound_scale=HALF)
        w = rep.witness
        p1 = TaggedPartition.from_json(w["partition"])
        p2 = TaggedPartition.from_json(w["partition2"])
        f = step_2d()
        achieved = abs(riemann_sum(f, p1) - riemann_sum(f, p2))
        assert achieved.to_json() == w["achieved"]


class TestHenstockLemma:
    def test_step_exact(self):
        rep = check_henstock_lemma(step_2d(), n=8, trials=20, seed=1)
        assert_passes(rep)
        assert rep.details["ob_exact"] is True

    def test_constant_zero_oscillation(self):
        f = StepFunction((0, 1), [vec(7)], name="const")
        rep = check_henstock_lemma(f, n=4, trials=10, seed=2)
        assert_passes(rep)
        assert rep.worst_slack.to_json() == rep.details["bound"]

    def test_monotone_exact(self):
        rep = check_henstock_lemma(linear(), n=8, trials=15, seed=3)
        assert_passes(rep)
        assert rep.details["ob_exact"] is True

    def test_signflip_sampled(self):
        f = PiecewiseFunction.smooth("parabola", [poly(F(2, 9), -1, 1)])
        rep = check_henstock_lemma(f, n=4, trials=10, seed=4)
        assert_passes(rep)
        assert rep.details["ob_exact"] is False

    def test_negative_control_violates(self):
        rep = check_henstock_lemma(step_2d(), n=8, trials=6, seed=5, bound_scale=HALF)
        assert rep.violated and rep.control


class TestPointwiseSums:
    @pytest.mark.parametrize("make", [step_2d, linear, mono_pair])
    def test_passes(self, make):
        assert_passes(check_pointwise_sums(make(), n=8, trials=30, seed=1))

    def test_float_monotone_vector(self):
        f = PiecewiseFunction.smooth(
            "t,t2,1-cos",
            [poly(0, 1), poly(0, 0, 1), TrigExpr("cos", 1.0, -1.0, 1.0)],
            monotone=True,
        )
        assert_passes(check_pointwise_sums(f, n=8, trials=20, seed=2))

    def test_negative_control_violates(self):
        rep = check_pointwise_sums(step_2d(), n=8, trials=6, seed=3, bound_scale=HALF)
        assert rep.violated


class TestTagSwap:
    @pytest.mark.parametrize("make", [step_2d, linear])
    def test_passes(self, make):
        assert_passes(check_tag_swap(make(), n=6, trials=30, seed=1))

    def test_uniform_extreme_tags_exact(self):
        # uniform n cells, left vs right tags: the sum is exactly delta/n
        from gaugeint.partitions import Interval, TaggedPartition

        f = linear()
        n = 10
        seq = OSequence.harmonic(vec(1))
        rep = check_tag_swap(f, seq, n=n, trials=5, seed=2)
        assert_passes(rep)
        total = LatticeVector.zeros(1)
        for i in range(n):
            iv = Interval(F(i, n), F(i + 1, n))
            total = total + abs(f.evaluate(iv.a) - f.evaluate(iv.b)).scale_length(iv.length)
        assert total == vec(F(1, n))

    def test_negative_control_violates(self):
        rep = check_tag_swap(linear(), n=8, trials=6, seed=3, bound_scale=HALF)
        assert rep.violated


class TestModulusIdentity:
    @pytest.mark.parametrize("coeffs,name", [
        ((F(-1, 2), F(1)), "t-1/2"),
        ((F(2, 9), F(-1), F(1)), "parabola"),
        ((F(-1, 8), F(3, 4), F(-3, 2), F(1)), "cubic"),
    ])
    def test_signflip_polys(self, coeffs, name):
        f = PiecewiseFunction.smooth(name, [poly(*coeffs)])
        rep = check_modulus_identity(f, depth=6)
        assert_passes(rep)

    def test_linear_halves(self):
        f = PiecewiseFunction.smooth("t-1/2", [poly(F(-1, 2), 1)])
        rep = check_modulus_identity(f, depth=3)
        assert rep.details["oracle"] == ["1/4"]
        assert_passes(rep)

    def test_nonnegative_depth0_equality(self):
        f = PiecewiseFunction.smooth("t2", [poly(0, 0, 1)])
        rep = check_modulus_identity(f, depth=0, tol=F(0))
        assert_passes(rep)


class TestAbsIntegral:
    def test_signflip_step(self):
        f = StepFunction((0, HALF, 1), [vec(3), vec(-2)], name="pm")
        rep = check_abs_integral(f, seed=1)
        assert_passes(rep)

    def test_nonnegative_equality(self):
        f = PiecewiseFunction.smooth("t2", [poly(0, 0, 1)])
        rep = check_abs_integral(f, seed=2)
        assert_passes(rep)
        assert rep.worst_slack.is_zero()


class TestVariational:
    def test_step_exact(self):
        rep = check_variational(step_2d(), eps=F(1, 100), trials=10, seed=1)
        assert_passes(rep)
        assert rep.details["l1_identity_exact"] is True

    def test_eps_scaling(self):
        rep = check_variational(step_2d(), eps=F(1, 1000), trials=6, seed=2)
        assert_passes(rep)
        assert rep.n >= 10  # tighter eps forces a later index

    def test_rejects_non_l1(self):
        from gaugeint.lattice import SUP

        with pytest.raises(ValueError):
            check_variational(step_2d(), Space(2, SUP), trials=2, seed=3)


class TestAeEquality:
    def test_spike_on_zero(self):
        base = StepFunction((0, 1), [vec(0)], name="zero")
        g = AeModifiedFunction(base, [(HALF, vec(5))], name="spike")
        rep = check_ae_equality(base, g, n=10, trials=20, seed=1)
        assert_passes(rep)
        assert rep.details["integrals_match"] is True

    def test_empty_exceptions_reduces_to_base(self):
        base = step_2d()
        g = AeModifiedFunction(base, [], name="same")
        rep = check_ae_equality(base, g, n=10, trials=10, seed=2)
        assert_passes(rep)

    def test_three_spikes_on_monotone(self):
        base = linear()
        g = AeModifiedFunction(
            base, [(F(1, 5), vec(100)), (HALF, vec(100)), (F(7, 9), vec(100))]
        )
        rep = check_ae_equality(base, g, n=100, trials=20, seed=3)
        assert_passes(rep)

    def test_negative_control_violates(self):
        base = StepFunction((0, 1), [vec(-50)], name="low")
        g = AeModifiedFunction(base, [(F(2, 5), vec(50))], name="flip")
        rep = check_ae_equality(base, g, n=10, trials=10, seed=4, bound_scale=HALF)
        assert rep.violated and rep.control


class TestAdditivity:
    @pytest.mark.parametrize("make", [step_2d, linear, mono_pair])
    def test_exact_on_rationals(self, make):
        rep = check_additivity(make(), trials=50, seed=1)
        assert_passes(rep)
        assert rep.worst_slack.is_zero()

    def test_explicit_split(self):
        rep = check_additivity(linear(), trials=1, seed=2, split_points=[HALF])
        assert_passes(rep)


class TestDimensionSweep:
    def test_scalar_case_coincides(self):
        report, rows = dimension_sweep(d_list=(1,), n=4, scaled=False, trials=4, seed=1)
        assert not report.violated
        assert rows[0]["sup_bound"] == rows[0]["l1_bound"]

    def test_unscaled_sup_flat_l1_grows(self):
        _, rows = dimension_sweep(d_list=(2, 4, 8), n=4, scaled=False, trials=4, seed=2)
        sups = [float(eval_frac(r["sup_bound"])) for r in rows]
        l1s = [float(eval_frac(r["l1_bound"])) for r in rows]
        assert max(sups) <= 2 * min(sups)  # sup-order size stays put
        assert l1s[0] < l1s[-1]  # variational size grows

    def test_scaled_l1_nondecreasing(self):
        report, rows = dimension_sweep(d_list=(1, 2, 4, 8), n=4, scaled=True, trials=4, seed=3)
        assert not report.violated
        l1s = [eval_frac(r["l1_bound"]) for r in rows]
        assert all(a <= b for a, b in zip(l1s, l1s[1:]))


def eval_frac(s: str) -> Fraction:
    return Fraction(*map(int, s.split("/"))) if "/" in s else Fraction(int(s))


class TestSuite:
    def test_default_suite_shape(self):
        corpus = [
            step_2d(),
            linear(),
            AeModifiedFunction(StepFunction((0, 1), [vec(0)], name="zero"), [(HALF, vec(5))]),
        ]
        reports = run_default_suite(corpus, n=6, trials=10, seed=7)
        assert all(isinstance(r, CheckReport) for r in reports)
        regular = [r for r in reports if not r.control]
        controls = [r for r in reports if r.control]
        assert all(not r.violated for r in regular), [
            (r.theorem, r.function, r.witness) for r in regular if r.violated
        ]
        assert controls and all(r.violated for r in controls), [
            (r.theorem, r.function) for r in controls if not r.violated
        ]

    def test_filters(self):
        reports = run_default_suite([step_2d()], n=6, trials=5, seed=1,
                                    checks=["cauchy"], with_controls=False)
        assert {r.theorem for r in reports} == {"cauchy"}
