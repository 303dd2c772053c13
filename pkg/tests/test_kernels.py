import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbzalg import _kernels
from bbzalg.finite_field import field

pytestmark = pytest.mark.skipif(_kernels.numba is None, reason="numba unavailable")


def components(images):
    """Reference connected components via plain BFS; label = smallest member."""
    G, N = images.shape
    adj = [set() for _ in range(N)]
    for g in range(G):
        for i in range(N):
            j = int(images[g, i])
            adj[i].add(j)
            adj[j].add(i)
    labels = [-1] * N
    for start in range(N):
        if labels[start] >= 0:
            continue
        stack, comp = [start], []
        labels[start] = start
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if labels[y] < 0:
                    labels[y] = start
                    stack.append(y)
    return np.array(labels)


@given(st.integers(1, 3), st.integers(1, 60), st.data())
def test_orbit_labels_agree(G, N, data):
    rows = [data.draw(st.lists(st.integers(0, N - 1), min_size=N, max_size=N)) for _ in range(G)]
    images = np.array(rows, dtype=np.int64)
    expect = components(images)
    assert np.array_equal(_kernels.orbit_labels(images, use_numba=True), expect)
    assert np.array_equal(_kernels.orbit_labels(images, use_numba=False), expect)


@given(st.sampled_from([2, 3, 4, 5, 8, 9]), st.integers(1, 3), st.integers(1, 3), st.integers(0, 20), st.data())
def test_matmul_and_sandwich_agree(q, r, c, N, data):
    F = field(q)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    X = rng.integers(0, q, size=(N, r, c))
    Y = rng.integers(0, q, size=(N, c, r))
    L = rng.integers(0, q, size=(r, r))
    R = rng.integers(0, q, size=(c, c))
    a = _kernels.batch_matmul(X, Y, F.add, F.mul, use_numba=True)
    b = _kernels.batch_matmul(X, Y, F.add, F.mul, use_numba=False)
    assert np.array_equal(a, b)
    s1 = _kernels.sandwich(L, X, R, F.add, F.mul, use_numba=True)
    s2 = _kernels.sandwich(L, X, R, F.add, F.mul, use_numba=False)
    assert np.array_equal(s1, s2)
    if q in (2, 3, 5) and N:
        assert np.array_equal(a, np.einsum("nij,njk->nik", X, Y) % q)


def test_shuffled_enumeration_keeps_orbit_partition():
    rng = np.random.default_rng(7)
    N = 200
    images = rng.integers(0, N, size=(2, N))
    perm = rng.permutation(N)
    inv = np.argsort(perm)
    shuffled = perm[images[:, inv]]
    base = _kernels.orbit_labels(images)
    moved = _kernels.orbit_labels(shuffled)
    assert len(set(base.tolist())) == len(set(moved.tolist()))
    for i in range(N):
        for j in (0, 5, 17):
            assert (base[i] == base[j]) == (moved[perm[i]] == moved[perm[j]])


def test_env_flag_disables_numba(monkeypatch):
    import importlib

    monkeypatch.setenv("BBZALG_DISABLE_NUMBA", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.USE_NUMBA is False
    finally:
        monkeypatch.delenv("BBZALG_DISABLE_NUMBA")
        importlib.reload(_kernels)
