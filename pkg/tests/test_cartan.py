import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbzalg.cartan import (
    BorcherdsCartanDatum,
    ChargeCapError,
    DatumError,
    Kind,
    RootVec,
    Vec,
    Weight,
    cartan_datum,
    collapse,
    divisors_of,
    expand_charge,
    mobius,
)
from bbzalg.monster import j_coefficients, monster_datum


def rank2(a, d=-2):
    return cartan_datum([[2, -a], [-a, d]])


class TestClassify:
    def test_monster_real_vertex(self):
        assert monster_datum(3).classify(-1) is Kind.REAL

    def test_isotropic(self):
        assert cartan_datum([[0]]).classify(0) is Kind.ISOTROPIC

    def test_monster_vertex_three_is_imaginary(self):
        d = monster_datum(3)
        assert d.a(3, 3) == -6
        assert d.classify(3) is Kind.IMAGINARY

    def test_unknown_vertex(self):
        with pytest.raises(DatumError):
            cartan_datum([[2]]).classify(7)


class TestValidation:
    @pytest.mark.parametrize(
        "matrix",
        [[[1]], [[-1]], [[2, 1], [1, 2]], [[2, 0], [-1, 2]], [[2, -1], [-3, 2], ]],
    )
    def test_rejects_bad_matrices(self, matrix):
        with pytest.raises(DatumError):
            # the last one has no consistent symmetrizer once we force s=(1,1)
            cartan_datum(matrix, symmetrizers=[1] * len(matrix))

    def test_minimal_symmetrizer_found(self):
        d = cartan_datum([[2, -1], [-3, 2]])
        assert d.s(0) * d.a(0, 1) == d.s(1) * d.a(1, 0)
        assert (d.s(0), d.s(1)) == (3, 1)

    def test_real_vertex_needs_unit_charge(self):
        with pytest.raises(DatumError):
            cartan_datum([[2]], charge=[2])


class TestBilinear:
    def test_sl2_norm(self):
        d = cartan_datum([[2]])
        assert d.bilinear(RootVec({0: 1}), RootVec({0: 1})) == 2

    @pytest.mark.parametrize("a", [1, 2, 3])
    def test_rank2_offdiagonal(self, a):
        d = rank2(a)
        assert d.bilinear(RootVec({0: 1}), RootVec({1: 1})) == -a

    def test_monster_imaginary_norm(self):
        d = monster_datum(2)
        assert d.bilinear(RootVec({1: 1}), RootVec({1: 1})) == -2

    def test_weight_pairing_rho(self):
        d = rank2(2)
        assert Weight.rho().pairing(d, 0) == 1
        assert Weight.rho().pairing(d, 1) == 1

    @given(
        st.lists(st.integers(0, 4), min_size=3, max_size=3),
        st.lists(st.integers(0, 4), min_size=3, max_size=3),
    )
    def test_symmetric_and_entrywise(self, x, y):
        d = cartan_datum([[2, -1, 0], [-2, 2, -1], [0, -1, -2]])
        a, b = RootVec(dict(enumerate(x))), RootVec(dict(enumerate(y)))
        assert d.bilinear(a, b) == d.bilinear(b, a)
        direct = sum(x[i] * y[j] * d.s(i) * d.a(i, j) for i in range(3) for j in range(3))
        assert d.bilinear(a, b) == direct


class TestExpandCharge:
    def test_unit_charge_is_identity(self):
        d = rank2(2)
        assert expand_charge(d) is d

    def test_constant_block(self):
        d = cartan_datum([[-2]], charge=[3])
        e = expand_charge(d)
        assert e.matrix() == [[-2] * 3] * 3
        assert e.charges() == {v: 1 for v in e.vertices}

    def test_monster_cap(self):
        c = j_coefficients(4)
        d = monster_datum(1, c)
        assert d.f(1) == 196884
        with pytest.raises(ChargeCapError):
            expand_charge(d)

    @given(st.integers(2, 4))
    def test_collapse_roundtrip(self, f):
        d = cartan_datum([[2, -1], [-1, -2]], charge=[1, f])
        e = expand_charge(d)
        for x, y in itertools.product(e.vertices, repeat=2):
            assert e.a(x, y) == d.a(x[0], y[0])
        v = RootVec({x: 1 for x in e.vertices})
        assert collapse(v) == RootVec({0: 1, 1: f})


class TestDivisors:
    @pytest.mark.parametrize(
        "alpha,expected", [({0: 4, 1: 4}, [1, 2, 4]), ({0: 4, 1: 2}, [1, 2]), ({0: 3, 1: 5}, [1])]
    )
    def test_examples(self, alpha, expected):
        assert divisors_of(RootVec(alpha)) == expected

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            divisors_of(RootVec())

    @given(st.integers(1, 400))
    def test_mobius_sums_to_indicator(self, n):
        assert sum(mobius(d) for d in range(1, n + 1) if n % d == 0) == (1 if n == 1 else 0)


class TestVec:
    def test_rootvec_rejects_negative(self):
        with pytest.raises(ValueError):
            RootVec({0: -1})

    def test_arithmetic(self):
        a = Vec({0: 1, 1: 2})
        b = Vec({0: -1, 1: 1})
        assert a + b == Vec({1: 3})
        assert (a - a).is_zero()
        assert RootVec({0: 2}).le(RootVec({0: 3, 1: 1}))
        assert not RootVec({0: 2, 2: 1}).le(RootVec({0: 3, 1: 1}))
        assert RootVec({0: 4, 1: 6}).coeff_gcd() == 2
        assert RootVec({0: 2, 1: 3}).height() == 5


def test_restrict_keeps_entries():
    d = BorcherdsCartanDatum([0, 1, 2], [[2, -1, 0], [-1, 2, -1], [0, -1, -2]])
    r = d.restrict([0, 2])
    assert r.matrix() == [[2, 0], [0, -2]]
