import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gaugeint.errors import BackendMismatchError, DimensionMismatchError
from gaugeint.lattice import (
    EUCLID,
    L1,
    SUP,
    LatticeVector,
    OSequence,
    Space,
    join,
    meet,
    modulus,
    norm,
    osequence_eval,
)

F = Fraction


def vec(*xs):
    return LatticeVector([F(x) for x in xs])


rationals = st.fractions(min_value=-10, max_value=10, max_denominator=64)


def rvec(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(LatticeVector)


class TestLatticeOps:
    def test_join_meet_basic(self):
        assert join(vec(1, -2), vec(0, 3)) == vec(1, 3)
        assert meet(vec(1, -2), vec(0, 3)) == vec(0, -2)

    def test_join_with_smaller(self):
        assert join(vec(0, 0), vec(-1, -1)) == vec(0, 0)

    def test_modulus(self):
        assert modulus(vec(-2, 3)) == vec(2, 3)
        assert modulus(vec(0, 0)) == vec(0, 0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            join(vec(1), vec(1, 2))

    def test_backend_mismatch(self):
        with pytest.raises(BackendMismatchError):
            vec(1, 2) + LatticeVector([0.5, 0.5])

    def test_mixed_entries_rejected(self):
        with pytest.raises(BackendMismatchError):
            LatticeVector([F(1), 0.5])

    @given(rvec(3))
    def test_join_idempotent(self, x):
        assert join(x, x) == x
        assert meet(x, x) == x

    @given(rvec(3), rvec(3))
    def test_meet_join_identity(self, x, y):
        assert meet(x, y) + join(x, y) == x + y

    @given(rvec(3), rvec(3))
    def test_commutativity(self, x, y):
        assert join(x, y) == join(y, x)
        assert meet(x, y) == meet(y, x)

    @given(rvec(2), rvec(2), rvec(2))
    def test_associativity(self, x, y, z):
        assert join(join(x, y), z) == join(x, join(y, z))
        assert meet(meet(x, y), z) == meet(x, meet(y, z))

    @given(rvec(2), rvec(2))
    def test_absorption(self, x, y):
        assert join(x, meet(x, y)) == x
        assert meet(x, join(x, y)) == x

    @given(rvec(3))
    def test_modulus_symmetry_and_positivity(self, x):
        assert modulus(-x) == modulus(x)
        assert modulus(x).is_nonnegative()
        assert modulus(x).is_zero() == x.is_zero()

    @given(rvec(2), rvec(2), rvec(2))
    def test_partial_order(self, x, y, z):
        assert x.le(x)
        if x.le(y) and y.le(x):
            assert x == y
        if x.le(y) and y.le(z):
            assert x.le(z)


class TestNorms:
    def test_l1(self):
        assert norm(Space(2, L1), vec(2, -3)) == F(5)

    def test_sup(self):
        assert norm(Space(2, SUP), vec(2, -3)) == F(3)

    def test_euclid(self):
        assert norm(Space(2, EUCLID), vec(3, 4)) == pytest.approx(5.0)

    def test_l1_additive_on_positives(self):
        x, y = vec(1, 2), vec(3, F(1, 3))
        s = Space(2, L1)
        assert norm(s, x + y) == norm(s, x) + norm(s, y)

    @given(rvec(3))
    def test_norm_of_modulus(self, x):
        for kind in (L1, SUP, EUCLID):
            s = Space(3, kind)
            assert norm(s, modulus(x)) == norm(s, x)

    @given(rvec(3).map(modulus), rvec(3).map(modulus))
    def test_sup_norm_join_of_positives(self, x, y):
        s = Space(3, SUP)
        assert norm(s, join(x, y)) == max(norm(s, x), norm(s, y))

    @given(rvec(3).map(modulus), rvec(3).map(modulus))
    def test_monotone(self, x, y):
        big = x + y  # 0 <= x <= x + y
        for kind in (L1, SUP, EUCLID):
            s = Space(3, kind)
            assert norm(s, x) <= norm(s, big) + 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            norm(Space(3, L1), vec(1, 2))


class TestOSequence:
    def test_harmonic_eval(self):
        seq = OSequence.harmonic(vec(1, 1))
        assert osequence_eval(seq, 4) == vec(F(1, 4), F(1, 4))

    def test_geometric_decreasing(self):
        seq = OSequence.geometric(vec(1, 2), F(1, 2))
        b = [seq(n) for n in (1, 2, 10)]
        assert b[1].le(b[0]) and b[2].le(b[1])

    def test_rejects_bad_index(self):
        seq = OSequence.harmonic(vec(1))
        with pytest.raises(ValueError):
            seq(0)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError):
            OSequence.harmonic(vec(0, 1))

    def test_index_reaching_harmonic(self):
        c = vec(3, 1)
        seq = OSequence.harmonic(c)
        tol = LatticeVector([F(1, 10**6)] * 2)
        n = seq.index_reaching(tol)
        assert n == 3 * 10**6  # ceil(max(c) * 1e6)
        assert seq(n).le(tol)
        assert not seq(n - 1).le(tol)

    def test_index_reaching_geometric(self):
        seq = OSequence.geometric(vec(1), F(1, 2))
        tol = vec(F(1, 1000))
        n = seq.index_reaching(tol)
        assert seq(n).le(tol)
        assert n >= 2 and not seq(n - 1).le(tol)

    def test_index_norm_below(self):
        seq = OSequence.harmonic(vec(1, 1, 1))
        s = Space(3, L1)
        n = seq.index_norm_below(s, F(1, 100))
        assert s.norm(seq(n)) <= F(1, 100)
        assert s.norm(seq(n - 1)) > F(1, 100)

    @pytest.mark.parametrize("make", [
        lambda: OSequence.harmonic(vec(2, F(1, 3))),
        lambda: OSequence.geometric(vec(1, 5), F(3, 4)),
    ])
    def test_order_continuity_norms_vanish(self, make):
        # decreasing to zero makes norms vanish in finite dimension
        seq = make()
        s = Space(2, SUP)
        for tol in (F(1, 10), F(1, 1000), F(1, 10**5)):
            n = seq.index_norm_below(s, tol)
            assert s.norm(seq(n)) <= tol

    def test_json_round_trip(self):
        seq = OSequence.geometric(vec(1, 2), F(1, 3))
        again = OSequence.from_json(seq.to_json())
        assert again(7) == seq(7)
