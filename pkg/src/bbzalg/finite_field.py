"""Small finite fields as lookup tables, plus dense linear algebra over them.

Elements of GF(p^e) are encoded as integers ``0..q-1`` whose base-``p`` digits
are the coefficients of a polynomial modulo a fixed monic irreducible.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

MAX_FIELD_ORDER = 256


def prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, e


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    e = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for k in range(e + 1):
                prod[d - e + k] = (prod[d - e + k] - c * modulus[k]) % p
    return (prod + [0] * e)[:e]


def _is_irreducible(poly: list[int], p: int) -> bool:
    # brute force: no monic factor of degree 1..deg/2
    e = len(poly) - 1
    for d in range(1, e // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            factor = list(tail) + [1]
            rem = list(poly)
            for k in range(e - d, -1, -1):
                c = rem[k + d]
                if c:
                    for t in range(d + 1):
                        rem[k + t] = (rem[k + t] - c * factor[t]) % p
            if not any(rem[:d]):
                return False
    return True


@lru_cache(maxsize=None)
def irreducible_polynomial(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree ``e`` (coefficients low to high)."""
    if e == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=e):
        poly = list(reversed(tail)) + [1]
        if poly[0] and _is_irreducible(poly, p):
            return tuple(poly)
    raise ArithmeticError(f"no irreducible polynomial of degree {e} over F_{p}")


class GF:
    """Finite field of order ``q`` with ``add``/``mul``/``neg``/``inv`` tables."""

    def __init__(self, q: int):
        if q > MAX_FIELD_ORDER:
            raise ValueError(f"field order {q} exceeds {MAX_FIELD_ORDER}")
        self.q = q
        self.p, self.e = prime_power(q)
        self.modulus = irreducible_polynomial(self.p, self.e)
        p, e = self.p, self.e
        digits = [self._digits(x) for x in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                add[x, y] = self._encode([(a + b) % p for a, b in zip(digits[x], digits[y])])
                mul[x, y] = self._encode(_poly_mulmod(digits[x], digits[y], list(self.modulus), p))
        self.add = add
        self.mul = mul
        self.neg = np.array([self._encode([(-a) % p for a in digits[x]]) for x in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for x in range(1, q):
            inv[x] = int(np.nonzero(mul[x] == 1)[0][0])
        self.inv = inv
        self.sub = add[:, self.neg]
        self.primitive = self._find_primitive()

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + int(c)
        return v

    def _find_primitive(self) -> int:
        for g in range(1, self.q):
            x, order = g, 1
            while x != 1:
                x = int(self.mul[x, g])
                order += 1
            if order == self.q - 1:
                return g
        raise ArithmeticError("no primitive element")

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> F_p inside this field."""
        return int(n) % self.p

    def pow(self, x: int, k: int) -> int:
        r = 1
        for _ in range(k):
            r = int(self.mul[r, x])
        return r

    def embedding_into(self, ext: "GF") -> np.ndarray:
        """Table sending each element of ``self`` to its image in ``ext`` (``ext`` must contain ``self``)."""
        if ext.p != self.p or ext.e % self.e:
            raise ValueError(f"F_{self.q} does not embed in F_{ext.q}")
        if self.e == 1:
            return np.arange(self.q, dtype=np.int64)
        root = None
        for r in range(ext.q):
            acc = 0
            power = 1
            for c in self.modulus:
                acc = int(ext.add[acc, ext.mul[ext.from_int(c), power]])
                power = int(ext.mul[power, r])
            if acc == 0:
                root = r
                break
        if root is None:
            raise ArithmeticError("defining polynomial has no root in the extension")
        table = np.zeros(self.q, dtype=np.int64)
        for x in range(self.q):
            acc, power = 0, 1
            for c in self._digits(x):
                acc = int(ext.add[acc, ext.mul[ext.from_int(c), power]])
                power = int(ext.mul[power, root])
            table[x] = acc
        return table

    def __repr__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


# -- dense linear algebra (small matrices, Python loops) ---------------------


def matmul(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    r, k = A.shape
    k2, c = B.shape
    if k != k2:
        raise ValueError("shape mismatch")
    out = np.zeros((r, c), dtype=np.int64)
    for t in range(k):
        out = F.add[out, F.mul[A[:, t][:, None], B[t, :][None, :]]]
    return out


def rref(F: GF, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    A = np.array(M, dtype=np.int64, copy=True)
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = F.mul[F.inv[A[r, c]], A[r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = F.sub[A[i], F.mul[A[i, c], A[r]]]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: GF, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace(F: GF, M: np.ndarray) -> np.ndarray:
    """Basis (rows) of ``{v : M v = 0}``."""
    rows, cols = M.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg[R[i, f]]
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)
