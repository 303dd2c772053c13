"""j-function coefficients and multiplicities of the Monster Lie and Borcherds-Bozec algebras."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable

from .bbzmult import MultiplicityEngine
from .cartan import BorcherdsCartanDatum, RootVec, mobius
from .series import DegreeBox, FormalSeries

MONSTER_REAL = -1


def _sigma3(n: int) -> int:
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def _poly_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


@dataclass(frozen=True)
class JCoefficients:
    """``c(n)`` for ``-1 <= n <= N`` with ``j(q) - 744 = sum c(n) q^n``."""

    values: tuple[int, ...]  # values[k] = c(k - 1)

    @property
    def N(self) -> int:
        return len(self.values) - 2

    def __call__(self, n: int) -> int:
        if n < -1 or n > self.N:
            raise IndexError(f"c({n}) outside computed range -1..{self.N}")
        return self.values[n + 1]

    def c(self, n: int) -> int:
        return self(n)

    def c_frac(self, x: Fraction) -> int:
        """``c(x)`` with the convention ``c(x) = 0`` for non-integral ``x``."""
        x = Fraction(x)
        return self(int(x)) if x.denominator == 1 else 0

    def as_dict(self) -> dict[int, int]:
        return {n - 1: v for n, v in enumerate(self.values)}


@lru_cache(maxsize=8)
def j_coefficients(N: int) -> JCoefficients:
    """Exact coefficients via ``E4^3 / Delta`` with ``Delta = q prod (1 - q^n)^24``."""
    if N < 2:
        raise ValueError("j_coefficients needs N >= 2")
    M = N + 1  # E4^3 / prod(1-q^n)^24 is needed through q^{N+1}
    e4 = [1] + [240 * _sigma3(n) for n in range(1, M + 1)]
    e4_cubed = _poly_mul(_poly_mul(e4, e4, M), e4, M)
    euler = [0] * (M + 1)
    euler[0] = 1
    for k in range(1, M + 1):
        for d in range(M, k - 1, -1):
            euler[d] -= euler[d - k]
    # 1 / prod(1-q^n)^24 = (1 / euler)^24; invert the Euler product first
    inv = [0] * (M + 1)
    inv[0] = 1
    for d in range(1, M + 1):
        inv[d] = -sum(euler[k] * inv[d - k] for k in range(1, d + 1))
    inv24 = [1] + [0] * M
    base, e = inv, 24
    while e:
        if e & 1:
            inv24 = _poly_mul(inv24, base, M)
        e >>= 1
        if e:
            base = _poly_mul(base, base, M)
    series = _poly_mul(e4_cubed, inv24, M)  # coefficient k is that of q^{k-1} in j
    series[1] -= 744
    coeffs = JCoefficients(tuple(series[: N + 2]))
    expected = {-1: 1, 0: 0, 1: 196884, 2: 21493760}
    for n, v in expected.items():
        if coeffs(n) != v:
            raise AssertionError(f"j-coefficient self-test failed at c({n})")
    return coeffs


def necklace(k: int, n: int) -> int:
    if k < 1 or n < 1:
        raise ValueError("necklace needs k, n >= 1")
    total = sum(mobius(d) * k ** (n // d) for d in range(1, n + 1) if n % d == 0)
    if total % n:
        raise ArithmeticError("necklace sum not divisible by n")
    return total // n


# -- pair-graded Witt machinery -------------------------------------------------


def pair_witt_series(m: int, n: int, weight: Callable[[int, int], int]) -> FormalSeries:
    """``-log(1 - sum_{i,j>=1} weight(i,j) x^i y^j)`` in the box ``(m, n)``."""
    box = DegreeBox({"m": m, "n": n})
    u = FormalSeries(
        {RootVec({"m": i, "n": j}): weight(i, j) for i in range(1, m + 1) for j in range(1, n + 1)},
        box,
    )
    return u.neg_log_one_minus()


def pair_witt_partitions(m: int, n: int, weight: Callable[[int, int], int]) -> Fraction:
    """Direct sum over partitions of ``(m, n)`` into pairs of positive integers."""
    from math import factorial

    pairs = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    total = Fraction(0)

    def rec(idx, rm, rn, counts, prod):
        nonlocal total
        if rm == 0 and rn == 0:
            den = 1
            for c in counts:
                den *= factorial(c)
            total += Fraction(factorial(sum(counts) - 1), den) * prod
            return
        if idx == len(pairs) or rm <= 0 or rn <= 0:
            return
        i, j = pairs[idx]
        rec(idx + 1, rm, rn, counts, prod)
        c, p = 0, prod
        d = weight(i, j)
        while rm - (c + 1) * i >= 0 and rn - (c + 1) * j >= 0:
            c += 1
            p *= d
            counts.append(c)
            rec(idx + 1, rm - c * i, rn - c * j, counts, p)
            counts.pop()

    rec(0, m, n, [], Fraction(1))
    return total


def _pair_mult(m: int, n: int, weight: Callable[[int, int], int], method: str) -> int:
    if m < 1 or n < 1:
        raise ValueError("pair multiplicities need m, n >= 1")
    if method == "partitions":
        def witt_at(a, b):
            return pair_witt_partitions(a, b, weight)
    else:
        series = pair_witt_series(m, n, weight)

        def witt_at(a, b):
            return series.coeff(RootVec({"m": a, "n": b}))

    g = gcd(m, n)
    acc = Fraction(0)
    for d in range(1, g + 1):
        if g % d == 0 and mobius(d):
            acc += Fraction(mobius(d), d) * witt_at(m // d, n // d)
    if acc.denominator != 1 or acc < 0:
        raise ArithmeticError(f"pair multiplicity at ({m},{n}) is {acc}")
    return int(acc)


def monster_lie_mult(m: int, n: int, coeffs: JCoefficients | None = None, method: str = "log") -> int:
    coeffs = coeffs or j_coefficients(max(m + n, 4))
    return _pair_mult(m, n, lambda i, j: coeffs(i + j - 1), method)


def monster_bozec_d(m: int, n: int, coeffs: JCoefficients | None = None) -> int:
    coeffs = coeffs or j_coefficients(max(m + n, 4))
    return sum(coeffs.c_frac(Fraction(m + n - l, l)) for l in range(1, min(m, n) + 1))


def monster_bozec_mult(m: int, n: int, coeffs: JCoefficients | None = None, method: str = "log") -> int:
    coeffs = coeffs or j_coefficients(max(m + n, 4))
    return _pair_mult(m, n, lambda i, j: monster_bozec_d(i, j, coeffs), method)


# -- root-graded pipeline -----------------------------------------------------


def monster_datum(K: int, coeffs: JCoefficients | None = None) -> BorcherdsCartanDatum:
    """Window ``{-1, 1, ..., K}`` of the Monster matrix ``a_ij = -(i + j)`` with charge ``c``."""
    coeffs = coeffs or j_coefficients(max(K, 2))
    vertices = [MONSTER_REAL] + list(range(1, K + 1))

    def entry(i, j):
        if i == j == MONSTER_REAL:
            return 2
        return -(i + j)

    charge = {v: (1 if v == MONSTER_REAL else coeffs(v)) for v in vertices}
    return BorcherdsCartanDatum(vertices, entry, {v: 1 for v in vertices}, charge, name="monster")


def monster_grading(alpha: RootVec) -> tuple[int, int]:
    """Image of a root-lattice vector in the ``(m, n)`` grading."""
    j = alpha[MONSTER_REAL]
    ls = [(k, l) for k, l in alpha.items if k != MONSTER_REAL]
    return sum(l for _, l in ls) + j, sum(k * l for k, l in ls) - j


def monster_engine(box: DegreeBox, coeffs: JCoefficients | None = None) -> MultiplicityEngine:
    K = max([v for v in box.vertices if v != MONSTER_REAL] + [1])
    coeffs = coeffs or j_coefficients(max(K, 2))
    datum = monster_datum(K, coeffs)
    return MultiplicityEngine(datum, (MONSTER_REAL,), box)


def monster_bozec_root_mult(alpha: RootVec, box: DegreeBox | None = None, coeffs: JCoefficients | None = None) -> int:
    for v in alpha.support():
        if not (v == MONSTER_REAL or (isinstance(v, int) and v >= 1)):
            raise ValueError(f"vertex {v!r} is not in the Monster index set")
    box = box or DegreeBox.of(alpha)
    return monster_engine(box, coeffs).multiplicity(alpha)


def roots_over_grade(m: int, n: int) -> list[RootVec]:
    """Root-lattice vectors ``sum l_k a_k + j a_{-1}`` mapping to grade ``(m, n)``."""
    out = []

    def parts(total, weighted, min_k, acc):
        if total == 0:
            if weighted == 0:
                out.append(dict(acc))
            return
        for k in range(min_k, weighted + 1):
            for l in range(1, total + 1):
                if k * l > weighted:
                    break
                acc[k] = l
                parts(total - l, weighted - k * l, k + 1, acc)
                del acc[k]

    for j in range(0, m):
        start = len(out)
        parts(m - j, n + j, 1, {})
        for d in out[start:]:
            d[MONSTER_REAL] = j
    return [RootVec(d) for d in out]
