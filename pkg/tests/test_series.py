from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbzalg.cartan import RootVec
from bbzalg.series import DegreeBox, FormalSeries, series_from_records

BOX1 = DegreeBox({0: 5})


def univariate(coeffs, box=BOX1):
    return FormalSeries({RootVec({0: k}): c for k, c in enumerate(coeffs)}, box)


def coeff_list(series, n):
    return [series.coeff(RootVec({0: k})) for k in range(n + 1)]


q = FormalSeries.monomial(RootVec({0: 1}), 1, BOX1)
one = FormalSeries.one(BOX1)


class TestMultiply:
    def test_geometric_series(self):
        geo = univariate([1] * 6)
        assert (one - q) * geo == one

    def test_euler_product_truncated(self):
        prod = one
        for k in range(1, 6):
            prod = prod * (one - FormalSeries.monomial(RootVec({0: k}), 1, BOX1))
        assert prod == univariate([1, -1, -1, 0, 0, 1])

    def test_truncation_drops_terms(self):
        box = DegreeBox({0: 2, 1: 2})
        a = FormalSeries.monomial(RootVec({0: 2}), 1, box)
        b = FormalSeries.monomial(RootVec({0: 1, 1: 1}), 1, box)
        assert (a * b) == FormalSeries.zero(box)

    def test_box_mismatch(self):
        with pytest.raises(ValueError):
            q * FormalSeries.one(DegreeBox({0: 3}))

    def test_keys_outside_box_truncated(self):
        s = FormalSeries({RootVec({0: 9}): 1, RootVec({0: 1}): 2}, BOX1)
        assert s.terms == {RootVec({0: 1}): 2}


class TestPower:
    def test_inverse_geometric(self):
        box = DegreeBox({0: 4})
        qq = FormalSeries.monomial(RootVec({0: 1}), 1, box)
        inv = (FormalSeries.one(box) - qq) ** -1
        assert coeff_list(inv, 4) == [1] * 5

    def test_free_algebra_character(self):
        box = DegreeBox({0: 4})
        qq = FormalSeries.monomial(RootVec({0: 1}), 1, box)
        o = FormalSeries.one(box)
        series = (o - qq.scale(2)) ** -1 * (o - qq)
        assert coeff_list(series, 4) == [1, 1, 2, 4, 8]

    def test_zeroth_power(self):
        assert univariate([3, 1, 4]) ** 0 == one

    def test_non_invertible(self):
        with pytest.raises(ZeroDivisionError):
            q ** -1


class TestLog:
    def test_log_series(self):
        box = DegreeBox({0: 3})
        qq = FormalSeries.monomial(RootVec({0: 1}), 1, box)
        assert coeff_list(qq.neg_log_one_minus(), 3) == [0, 1, Fraction(1, 2), Fraction(1, 3)]

    def test_free_algebra_witt_value(self):
        box = DegreeBox({0: 4})
        chv = FormalSeries({RootVec({0: k}): 1 for k in range(1, 5)}, box)
        assert chv.neg_log_one_minus().coeff(RootVec({0: 4})) == Fraction(15, 4)

    def test_zero(self):
        assert FormalSeries.zero(BOX1).neg_log_one_minus() == FormalSeries.zero(BOX1)

    def test_nonzero_constant(self):
        with pytest.raises(ValueError):
            one.neg_log_one_minus()


class TestSerialization:
    def test_records_roundtrip(self):
        box = DegreeBox({"a": 2, "b": 3})
        s = FormalSeries({RootVec({"a": 1}): Fraction(7, 4), RootVec({"a": 2, "b": 3}): -3}, box)
        assert series_from_records(s.to_records(), box) == s

    def test_json_has_string_numbers(self):
        s = FormalSeries({RootVec({0: 1}): 10**30}, BOX1)
        assert '"num": "1000000000000000000000000000000"' in s.to_json()

    def test_printable_lines(self):
        s = univariate([1, Fraction(-1, 2)])
        assert str(s) == "1\n-1/2 * e^{-(1 a[0])}"


BOX2 = DegreeBox({0: 3, 1: 2})
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
series_strategy = st.dictionaries(st.sampled_from(BOX2.points()), coeff, max_size=8).map(
    lambda d: FormalSeries(d, BOX2)
)
invertible = st.tuples(st.fractions(min_value=1, max_value=3, max_denominator=3), series_strategy).map(
    lambda t: FormalSeries.one(BOX2).scale(t[0]) + t[1] - FormalSeries.one(BOX2).scale(t[1].constant())
)
nilpotent = series_strategy.map(lambda s: s - FormalSeries.one(BOX2).scale(s.constant()))


class TestRingLaws:
    @given(series_strategy, series_strategy, series_strategy)
    def test_associative_commutative_distributive(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @given(invertible, st.integers(-3, 3))
    def test_pow_inverse(self, a, n):
        assert (a**n) * (a ** (-n)) == FormalSeries.one(BOX2)

    @given(nilpotent)
    def test_exp_of_log_is_geometric(self, u):
        one2 = FormalSeries.one(BOX2)
        assert u.neg_log_one_minus().exp() == (one2 - u) ** -1
