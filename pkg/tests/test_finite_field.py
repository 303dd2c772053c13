import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbzalg.finite_field import GF, field, matmul, nullspace, prime_power, rank
from bbzalg.interpolation import InterpolationError, fit_counting_polynomial

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms(q):
    F = field(q)
    x = np.arange(q)
    assert (F.add[x, 0] == x).all() and (F.mul[x, 1] == x).all()
    assert (F.add[x, F.neg] == 0).all()
    assert (F.mul[x[1:], F.inv[1:]] == 1).all()
    assert (F.add == F.add.T).all() and (F.mul == F.mul.T).all()
    a, b, c = np.meshgrid(x, x, x, indexing="ij")
    assert (F.mul[a, F.add[b, c]] == F.add[F.mul[a, b], F.mul[a, c]]).all()
    assert (F.mul[F.mul[a, b], c] == F.mul[a, F.mul[b, c]]).all()
    powers = {F.pow(F.primitive, k) for k in range(q - 1)}
    assert powers == set(range(1, q))


@pytest.mark.parametrize("small,big", [(2, 4), (2, 8), (3, 9), (4, 16), (3, 27)])
def test_embedding_is_ring_map(small, big):
    F, E = field(small), field(big)
    t = F.embedding_into(E)
    x = np.arange(small)
    a, b = np.meshgrid(x, x, indexing="ij")
    assert (t[F.add[a, b]] == E.add[t[a], t[b]]).all()
    assert (t[F.mul[a, b]] == E.mul[t[a], t[b]]).all()
    assert len(set(t.tolist())) == small


def test_embedding_rejects_wrong_characteristic():
    with pytest.raises(ValueError):
        field(4).embedding_into(field(9))


def test_prime_power():
    assert prime_power(27) == (3, 3)
    with pytest.raises(ValueError):
        prime_power(12)
    with pytest.raises(ValueError):
        GF(512)


@given(st.sampled_from([2, 3, 4, 5]), st.integers(1, 4), st.integers(1, 4), st.data())
def test_rank_nullity(q, r, c, data):
    F = field(q)
    m = np.array(data.draw(st.lists(st.integers(0, q - 1), min_size=r * c, max_size=r * c))).reshape(r, c)
    ns = nullspace(F, m)
    assert rank(F, m) + ns.shape[0] == c
    if ns.shape[0]:
        assert not matmul(F, m, ns.T).any()


class TestInterpolation:
    def test_exact_fit(self):
        poly = fit_counting_polynomial([(2, 5), (3, 10), (4, 17), (5, 26)], 2)
        assert poly.coeffs == (1, 0, 1) and poly.degree_certified

    def test_residual(self):
        with pytest.raises(InterpolationError) as err:
            fit_counting_polynomial([(2, 1), (3, 2), (4, 4)], 1)
        assert err.value.samples == [(2, 1), (3, 2), (4, 4)]

    def test_non_integral(self):
        with pytest.raises(InterpolationError):
            fit_counting_polynomial([(2, 1), (4, 2)], 0)

    def test_uncertified(self):
        poly = fit_counting_polynomial([(2, 3), (3, 4), (4, 5), (5, 6)], 5)
        assert not poly.degree_certified and poly.coeffs == (1, 1) and poly.notes

    def test_constant(self):
        assert fit_counting_polynomial([(2, 1), (3, 1)], 0).coeffs == (1,)
