from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gwprofile.errors import DomainError
from gwprofile.series import BivariateSeries, RationalSeries

ORDER = 8

rationals = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)


def series(order=ORDER):
    return st.lists(rationals, min_size=order + 1, max_size=order + 1).map(
        RationalSeries
    )


class TestRing:
    @given(series(), series())
    def test_add_commutes(self, a, b):
        assert a + b == b + a

    @given(series(), series(), series())
    def test_mul_distributes(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @given(series())
    def test_sub_self(self, a):
        assert a - a == RationalSeries.zero(ORDER)

    def test_getitem(self):
        s = RationalSeries([1, 2, 3])
        assert s[0] == 1 and s[2] == 3
        assert s.extend(5)[5] == 0


class TestDivision:
    @given(series())
    def test_div_roundtrip(self, a):
        b = RationalSeries([Fraction(1)] + [Fraction(1, 3)] * ORDER)
        assert (a / b) * b == a

    def test_div_by_zero_valuation(self):
        with pytest.raises(DomainError):
            RationalSeries([1, 0]) / RationalSeries([0, 1])


class TestSqrt:
    def test_known(self):
        # sqrt(1 - 4z) has Catalan-related coefficients
        s = RationalSeries([1, -4] + [0] * 6).sqrt()
        assert s[0] == 1 and s[1] == -2 and s[2] == -2 and s[3] == -4

    @given(series())
    def test_square_root_roundtrip(self, a):
        u = RationalSeries.constant(1, ORDER) + a * RationalSeries.identity(ORDER)
        assert u.sqrt() * u.sqrt() == u

    def test_non_square_constant(self):
        with pytest.raises(DomainError):
            RationalSeries([2, 1]).sqrt()


class TestCompose:
    def test_identity(self):
        a = RationalSeries([3, 1, 4, 1, 5])
        assert a.compose(RationalSeries.identity(4)) == a

    @given(series())
    def test_zero_inner(self, a):
        z = RationalSeries.zero(ORDER)
        assert a.compose(z) == RationalSeries.constant(a[0], ORDER)

    def test_constant_inner_is_horner(self):
        # composing with a constant-term series evaluates by Horner
        got = RationalSeries([1, 1]).compose(RationalSeries([1, 1]))
        assert got[0] == 2 and got[1] == 1


class TestCalculus:
    @given(series())
    def test_derivative_linear(self, a):
        b = RationalSeries([Fraction(1, 2)] * (ORDER + 1))
        lhs = (a + b).derivative()
        rhs = a.derivative() + b.derivative()
        assert lhs == rhs

    def test_evaluate(self):
        s = RationalSeries([1, 2, 3])
        assert s.evaluate(Fraction(1, 2)) == 1 + 1 + Fraction(3, 4)


class TestBivariate:
    def test_mul(self):
        a = BivariateSeries([[1, 1], [1, 0]])  # 1 + u + z
        b = BivariateSeries([[1, 0], [1, 0]])  # 1 + z
        c = a * b
        assert c[0, 0] == 1 and c[0, 1] == 1 and c[1, 0] == 2 and c[1, 1] == 1

    def test_shift_u(self):
        a = BivariateSeries([[1, 2], [3, 4]])
        s = a.shift_u()
        assert s[0, 1] == 1 and s[1, 1] == 3 and s[0, 0] == 0
