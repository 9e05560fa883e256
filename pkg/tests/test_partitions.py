import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gaugeint.functions import PiecewiseFunction, StepFunction, poly
from gaugeint.lattice import LatticeVector
from gaugeint.partitions import (
    HENSTOCK,
    INHERITED,
    LEFT,
    MCSHANE,
    MIDPOINT,
    Gage,
    Interval,
    TaggedPartition,
    common_refinement,
    cousin_partition,
    is_fine,
    random_fine_partition,
    refine,
    riemann_sum,
)

F = Fraction


def uniform_partition(n, tag="mid"):
    items = []
    for i in range(n):
        iv = Interval(F(i, n), F(i + 1, n))
        t = iv.midpoint() if tag == "mid" else (iv.a if tag == "left" else iv.b)
        items.append((iv, t))
    return TaggedPartition(items)


class TestInterval:
    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            Interval(F(1, 2), F(1, 2))
        with pytest.raises(ValueError):
            Interval(F(-1, 2), F(1, 2))

    def test_length(self):
        assert Interval(F(1, 4), F(3, 4)).length == F(1, 2)


class TestGage:
    def test_piecewise_lookup(self):
        g = Gage((0, F(1, 2), 1), (F(1, 2), F(1, 100)))
        assert g(F(1, 4)) == F(1, 2)
        assert g(F(1, 2)) == F(1, 100)
        assert g(F(1)) == F(1, 100)
        assert g.delta_min == F(1, 100)

    def test_positive_values_required(self):
        with pytest.raises(ValueError):
            Gage((0, 1), (0,))

    def test_overlay(self):
        g = Gage.constant(F(1, 4)).with_min_overlay([(F(1, 2) - F(1, 100), F(1, 2) + F(1, 100), F(1, 100))])
        assert g(F(1, 2)) == F(1, 100)
        assert g(F(1, 4)) == F(1, 4)

    def test_json_round_trip(self):
        g = Gage((0, F(1, 3), 1), (F(1, 7), F(2, 5)))
        g2 = Gage.from_json(g.to_json())
        assert g2.breakpoints == g.breakpoints and g2.values == g.values


class TestFineness:
    def test_direct_check_true(self):
        pi = uniform_partition(4)
        assert is_fine(Gage.constant(F(3, 10)), pi)

    def test_direct_check_false(self):
        pi = uniform_partition(4)
        assert not is_fine(Gage.constant(F(1, 10)), pi)

    def test_single_interval(self):
        pi = TaggedPartition([(Interval(F(0), F(1)), F(1, 2))])
        assert is_fine(Gage.constant(F(6, 10)), pi)

    def test_open_end_equality_allowed(self):
        # b - t == gamma passes (open right end), t - a == gamma fails
        g = Gage.constant(F(3, 5))
        ok = TaggedPartition([(Interval(F(0), F(1)), F(2, 5))])
        assert is_fine(g, ok)  # b - t = 3/5 == gamma, t - a = 2/5 < gamma
        bad = TaggedPartition([(Interval(F(0), F(1)), F(3, 5))])
        assert not is_fine(g, bad)  # t - a = 3/5 == gamma: strict side


class TestPartitionValidation:
    def test_must_cover(self):
        with pytest.raises(ValueError):
            TaggedPartition([(Interval(F(0), F(1, 2)), F(0))])

    def test_no_overlap(self):
        with pytest.raises(ValueError):
            TaggedPartition([
                (Interval(F(0), F(2, 3)), F(0)),
                (Interval(F(1, 3), F(1)), F(1)),
            ])

    def test_henstock_tag_in_closure(self):
        with pytest.raises(ValueError):
            TaggedPartition([
                (Interval(F(0), F(1, 2)), F(3, 4)),
                (Interval(F(1, 2), F(1)), F(3, 4)),
            ], kind=HENSTOCK)
        # the same tags are fine for a free partition
        TaggedPartition([
            (Interval(F(0), F(1, 2)), F(3, 4)),
            (Interval(F(1, 2), F(1)), F(3, 4)),
        ], kind=MCSHANE)

    def test_measure_sums_to_one(self):
        pi = uniform_partition(7)
        assert pi.total_length() == F(1)


class TestCousin:
    def test_constant_gage(self):
        pi = cousin_partition(Gage.constant(F(3, 10)))
        assert is_fine(Gage.constant(F(3, 10)), pi)
        assert all(iv.length < F(3, 10) * 2 for iv, _ in pi)
        assert pi.total_length() == F(1)

    def test_two_piece_gage(self):
        g = Gage((0, F(1, 2), 1), (F(1, 2), F(1, 100)))
        pi = cousin_partition(g)
        assert is_fine(g, pi)
        left = [iv for iv, _ in pi if iv.b <= F(1, 2)]
        right = [iv for iv, _ in pi if iv.a >= F(1, 2)]
        assert len(left) <= 4
        # fineness forces right-side widths below 2 * gamma = 1/50
        assert all(iv.length < F(2, 100) for iv in right)
        assert pi.total_length() == F(1)

    def test_huge_gage_single_interval(self):
        pi = cousin_partition(Gage.constant(F(2)))
        assert len(pi) == 1

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.randoms(use_true_random=False))
    def test_round_trip_random_gages(self, pieces, rnd):
        cuts = sorted({F(rnd.randrange(1, 64), 64) for _ in range(pieces - 1)})
        bps = [F(0)] + cuts + [F(1)]
        vals = [F(rnd.randrange(1, 40), 100) for _ in range(len(bps) - 1)]
        g = Gage(bps, vals)
        pi = cousin_partition(g)
        assert is_fine(g, pi)
        assert pi.total_length() == F(1)


class TestRefine:
    def test_split_midpoint(self):
        pi = TaggedPartition([(Interval(F(0), F(1)), F(1, 2))])
        out = refine(pi, 2, tag_policy=MIDPOINT)
        assert out.intervals() == (Interval(F(0), F(1, 2)), Interval(F(1, 2), F(1)))
        assert [t for _, t in out] == [F(1, 4), F(3, 4)]

    def test_identity(self):
        pi = uniform_partition(3)
        out = refine(pi, 1, tag_policy=INHERITED)
        assert out.items == pi.items

    def test_refine_keeps_fineness_constant_gage(self):
        g = Gage.constant(F(1, 4))
        pi = cousin_partition(g)
        out = refine(pi, 3, tag_policy=MIDPOINT)
        assert is_fine(g, out)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            refine(uniform_partition(2), 0)


class TestCommonRefinement:
    def test_breakpoint_union(self):
        p1 = TaggedPartition([(Interval(F(0), F(1, 2)), F(0)), (Interval(F(1, 2), F(1)), F(1, 2))])
        p2 = TaggedPartition([(Interval(F(0), F(1, 3)), F(0)), (Interval(F(1, 3), F(1)), F(1, 3))])
        out = common_refinement(p1, p2)
        assert [iv.a for iv in out.intervals()] == [F(0), F(1, 3), F(1, 2)]

    def test_idempotent_intervals(self):
        p = uniform_partition(5)
        assert common_refinement(p, p).intervals() == p.intervals()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 10), st.integers(1, 10))
    def test_counting_bound(self, n, m):
        p1, p2 = uniform_partition(n), uniform_partition(m)
        out = common_refinement(p1, p2)
        assert len(out) <= len(p1) + len(p2) - 1


class TestRiemannSum:
    def test_linear(self):
        f = PiecewiseFunction.smooth("t", [poly(0, 1)])
        pi = TaggedPartition([
            (Interval(F(0), F(1, 2)), F(1, 2)),
            (Interval(F(1, 2), F(1)), F(1)),
        ])
        assert riemann_sum(f, pi) == LatticeVector([F(3, 4)])

    def test_constant(self):
        c = LatticeVector([F(2), F(-1)])
        f = StepFunction((0, 1), [c])
        assert riemann_sum(f, uniform_partition(7)) == c

    def test_step_left_tags(self):
        f = StepFunction((0, F(1, 2), 1), [LatticeVector([F(1), F(0)]), LatticeVector([F(0), F(0)])])
        pi = uniform_partition(2, tag="left")
        assert riemann_sum(f, pi) == LatticeVector([F(1, 2), F(0)])

    def test_additive_under_refinement_for_steps(self):
        f = StepFunction((0, F(1, 2), 1), [LatticeVector([F(3)]), LatticeVector([F(-1)])])
        pi = uniform_partition(4, tag="left")
        fine = refine(pi, 3, tag_policy=INHERITED)
        assert riemann_sum(f, pi) == riemann_sum(f, fine)


class TestRandomFine:
    @pytest.mark.parametrize("style", ["walk", "cousin"])
    @pytest.mark.parametrize("kind", [HENSTOCK, MCSHANE])
    def test_generator_is_fine(self, style, kind):
        g = Gage((0, F(1, 3), F(2, 3), 1), (F(1, 8), F(1, 32), F(1, 5)))
        rng = random.Random(7)
        for _ in range(10):
            pi = random_fine_partition(g, rng, kind=kind, style=style)
            assert is_fine(g, pi)
            assert pi.total_length() == F(1)
            assert pi.kind == kind

    def test_deterministic_given_seed(self):
        g = Gage.constant(F(1, 9))
        a = random_fine_partition(g, random.Random(42)).to_json()
        b = random_fine_partition(g, random.Random(42)).to_json()
        assert a == b


class TestSerialization:
    def test_partition_round_trip(self):
        pi = uniform_partition(3)
        again = TaggedPartition.from_json(pi.to_json())
        assert again.items == pi.items and again.kind == pi.kind

    def test_tags_as_rational_strings(self):
        pi = uniform_partition(3)
        blob = pi.to_json()
        assert blob["items"][0]["tag"] == "1/6"
