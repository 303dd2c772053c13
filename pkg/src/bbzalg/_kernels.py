"""Hot finite-field kernels with numba and pure-numpy implementations.

Set ``BBZALG_DISABLE_NUMBA=1`` to force the numpy versions.  Both variants
return identical arrays; tests run them against each other.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("BBZALG_DISABLE_NUMBA", "") not in ("1", "true", "yes")

_CHUNK = 1 << 16


# -- numpy versions ---------------------------------------------------------------


def batch_matmul_np(A: np.ndarray, B: np.ndarray, add: np.ndarray, mul: np.ndarray) -> np.ndarray:
    """``A[n] @ B[n]`` over a table field; ``A``: (N,r,k), ``B``: (N,k,c)."""
    N, r, k = A.shape
    c = B.shape[2]
    out = np.zeros((N, r, c), dtype=np.int64)
    for t in range(k):
        out = add[out, mul[A[:, :, t][:, :, None], B[:, t, :][:, None, :]]]
    return out


def sandwich_np(L: np.ndarray, X: np.ndarray, R: np.ndarray, add: np.ndarray, mul: np.ndarray) -> np.ndarray:
    """``L @ X[n] @ R`` for fixed ``L`` (r,r) and ``R`` (c,c)."""
    N = X.shape[0]
    Lb = np.broadcast_to(L, (N,) + L.shape)
    Rb = np.broadcast_to(R, (N,) + R.shape)
    return batch_matmul_np(batch_matmul_np(Lb, X, add, mul), Rb, add, mul)


def orbit_labels_np(images: np.ndarray) -> np.ndarray:
    """Connected components of the graph ``i -- images[g, i]``; label = smallest index."""
    G, N = images.shape
    labels = np.arange(N, dtype=np.int64)
    while True:
        old = labels.copy()
        for g in range(G):
            img = images[g]
            np.minimum.at(labels, img, labels)
            labels = np.minimum(labels, labels[img])
        labels = labels[labels]
        if np.array_equal(labels, old):
            return labels


# -- numba versions ---------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _batch_matmul_nb(A, B, add, mul):
        N, r, k = A.shape
        c = B.shape[2]
        out = np.zeros((N, r, c), dtype=np.int64)
        for n in range(N):
            for i in range(r):
                for j in range(c):
                    acc = 0
                    for t in range(k):
                        acc = add[acc, mul[A[n, i, t], B[n, t, j]]]
                    out[n, i, j] = acc
        return out

    @numba.njit(cache=True)
    def _sandwich_nb(L, X, R, add, mul):
        N, r, c = X.shape
        out = np.zeros((N, r, c), dtype=np.int64)
        tmp = np.zeros((r, c), dtype=np.int64)
        for n in range(N):
            for i in range(r):
                for j in range(c):
                    acc = 0
                    for t in range(r):
                        acc = add[acc, mul[L[i, t], X[n, t, j]]]
                    tmp[i, j] = acc
            for i in range(r):
                for j in range(c):
                    acc = 0
                    for t in range(c):
                        acc = add[acc, mul[tmp[i, t], R[t, j]]]
                    out[n, i, j] = acc
        return out

    @numba.njit(cache=True)
    def _find(parent, x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    @numba.njit(cache=True)
    def _orbit_labels_nb(images):
        G, N = images.shape
        parent = np.arange(N, dtype=np.int64)
        for g in range(G):
            for i in range(N):
                a = _find(parent, i)
                b = _find(parent, images[g, i])
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
        labels = np.empty(N, dtype=np.int64)
        for i in range(N):
            labels[i] = _find(parent, i)
        return labels


def batch_matmul(A, B, add, mul, use_numba: bool | None = None):
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    A = np.ascontiguousarray(A, dtype=np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    if use:
        return _batch_matmul_nb(A, B, add, mul)
    if A.shape[0] <= _CHUNK:
        return batch_matmul_np(A, B, add, mul)
    return np.concatenate(
        [batch_matmul_np(A[s : s + _CHUNK], B[s : s + _CHUNK], add, mul) for s in range(0, A.shape[0], _CHUNK)]
    )


def sandwich(L, X, R, add, mul, use_numba: bool | None = None):
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    L = np.ascontiguousarray(L, dtype=np.int64)
    R = np.ascontiguousarray(R, dtype=np.int64)
    X = np.ascontiguousarray(X, dtype=np.int64)
    if use:
        return _sandwich_nb(L, X, R, add, mul)
    return np.concatenate(
        [sandwich_np(L, X[s : s + _CHUNK], R, add, mul) for s in range(0, max(X.shape[0], 1), _CHUNK)]
    ) if X.shape[0] else np.zeros_like(X)


def orbit_labels(images, use_numba: bool | None = None):
    use = USE_NUMBA if use_numba is None else (use_numba and numba is not None)
    images = np.ascontiguousarray(images, dtype=np.int64)
    if images.shape[1] == 0:
        return np.zeros(0, dtype=np.int64)
    if use:
        return _orbit_labels_nb(images)
    return orbit_labels_np(images)
