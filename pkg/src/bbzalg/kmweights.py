"""Kac-Moody slice on a set J of real vertices.

Root multiplicities come from the Peterson recurrence and weight
multiplicities of integrable highest-weight modules from Freudenthal's
formula, both evaluated in order of increasing height inside a box.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable

from .cartan import BorcherdsCartanDatum, DatumError, RootVec, Vec, Vertex, Weight, root_sort_key
from .series import DegreeBox, FormalSeries

log = logging.getLogger(__name__)


class FreudenthalError(ArithmeticError):
    """Freudenthal recursion hit an inconsistent zero denominator."""


class KMSlice:
    """The Kac-Moody subalgebra generated by the real vertices ``J``."""

    def __init__(self, datum: BorcherdsCartanDatum, J: Iterable[Vertex], box: DegreeBox):
        self.datum = datum
        self.J = frozenset(J)
        for j in self.J:
            if j not in datum or not datum.is_real(j):
                raise DatumError(f"slice vertex {j!r} must be a real vertex of the window")
        self.box = box.restrict(self.J)
        self._c: dict[RootVec, Fraction] = {}
        self._mult: dict[RootVec, int] = {}
        self._roots: list[tuple[RootVec, int]] | None = None
        self._fill()

    def _form(self, x: Vec, y: Vec) -> int:
        return self.datum.bilinear(x, y)

    def _fill(self) -> None:
        pts = [p for p in self.box.points() if not p.is_zero()]
        c, mult = self._c, self._mult
        for beta in pts:
            if beta.height() == 1:
                c[beta] = Fraction(1)
                mult[beta] = 1
                continue
            rho_part = sum(k * self.datum.s(j) for j, k in beta.items)
            den = self._form(beta, beta) - 2 * rho_part
            rhs = Fraction(0)
            for b1, c1 in c.items():
                if not c1 or not b1.le(beta) or b1 == beta:
                    continue
                b2 = (beta - b1).to_root()
                c2 = c.get(b2)
                if c2:
                    rhs += self._form(b1, b2) * c1 * c2
            g = beta.coeff_gcd()
            from_divisors = sum(
                (Fraction(mult.get(RootVec({v: n // k for v, n in beta.items}), 0), k) for k in range(2, g + 1) if g % k == 0),
                Fraction(0),
            )
            if den == 0:
                # (beta, beta) = 2 (beta, rho) > 0 here, and no non-simple real root satisfies it: mult is 0
                if rhs != 0:
                    raise DatumError(f"Peterson recurrence: zero denominator at {beta} with nonzero right side")
                c[beta] = from_divisors
                mult[beta] = 0
                continue
            cb = rhs / den
            c[beta] = cb
            m = cb - from_divisors
            if m.denominator != 1 or m < 0:
                raise DatumError(f"Peterson recurrence produced non-integral multiplicity {m} at {beta}")
            mult[beta] = int(m)

    def peterson_mult(self, beta: RootVec) -> int:
        if beta.is_zero():
            raise ValueError("peterson_mult of the zero vector")
        if any(v not in self.J for v in beta.support()):
            raise ValueError(f"{beta} is not supported on J")
        if not self.box.contains(beta):
            raise ValueError(f"{beta} outside the slice box")
        return self._mult[beta]

    def positive_roots(self) -> list[tuple[RootVec, int]]:
        """``(root, multiplicity)`` for every positive root of the slice in the box."""
        if self._roots is None:
            self._roots = sorted(((b, m) for b, m in self._mult.items() if m > 0), key=lambda t: root_sort_key(t[0]))
        return self._roots

    # -- Freudenthal -----------------------------------------------------------
    def check_dominant(self, weight: Weight) -> None:
        for j in self.J:
            if weight.pairing(self.datum, j) < 0:
                raise DatumError(f"weight {weight} is not J-dominant at {j!r}")

    def weight_multiplicities(self, weight: Weight, box: DegreeBox | None = None) -> dict[RootVec, int]:
        """``{beta: dim V_J(weight)_{weight - beta}}`` for ``beta`` in Q+^J within the box."""
        self.check_dominant(weight)
        jbox = self.box if box is None else box.restrict(self.J)
        datum = self.datum
        lam = {j: weight.pairing(datum, j) for j in self.J}
        roots = [(a, m) for a, m in self.positive_roots() if jbox.contains(a)]
        m_of: dict[RootVec, int] = {RootVec(): 1}
        zero_den = 0
        for beta in jbox.points():
            if beta.is_zero():
                continue
            den = 2 * sum(k * datum.s(j) * (lam[j] + 1) for j, k in beta.items) - self._form(beta, beta)
            num = 0
            for alpha, mult in roots:
                if not alpha.le(beta):
                    continue
                lam_alpha = sum(k * datum.s(j) * lam[j] for j, k in alpha.items)
                aa = self._form(alpha, alpha)
                b_alpha = self._form(beta, alpha)
                k = 1
                inner = 0
                step = alpha
                while step.le(beta):
                    prev = m_of.get((beta - step).to_root(), 0)
                    if prev:
                        inner += (lam_alpha - b_alpha + k * aa) * prev
                    k += 1
                    step = step + alpha
                num += mult * inner
            num *= 2
            if den == 0:
                if num != 0:
                    raise FreudenthalError(f"vanishing Freudenthal denominator at offset {beta} with numerator {num}")
                zero_den += 1
                continue
            if num % den:
                raise FreudenthalError(f"non-integral weight multiplicity {Fraction(num, den)} at offset {beta}")
            val = num // den
            if val < 0:
                raise FreudenthalError(f"negative weight multiplicity {val} at offset {beta}")
            if val:
                m_of[beta] = val
        if zero_den:
            log.debug("Freudenthal: %d offsets with zero denominator and zero numerator (not weights)", zero_den)
        return m_of

    def freudenthal_dim(self, weight: Weight, mu: Weight) -> int:
        if mu.base != weight.base:
            raise ValueError("weights must share the same symbolic base")
        beta = weight.offset - mu.offset
        if not beta.is_nonneg() and not beta.is_zero():
            return 0
        if any(v not in self.J for v in beta.support()):
            return 0
        beta = beta.to_root()
        if not self.box.contains(beta):
            raise ValueError(f"offset {beta} lies outside the slice box {self.box}")
        return self.weight_multiplicities(weight, DegreeBox.of(beta)).get(beta, 0)


def ch_VJ(slice_: KMSlice, weight: Weight, box: DegreeBox, shift: RootVec | None = None) -> FormalSeries:
    """Character of ``V_J(weight)`` as a series keyed by ``shift + (weight - mu)``."""
    shift = shift if shift is not None else RootVec()
    mults = slice_.weight_multiplicities(weight, box)
    return FormalSeries({shift + b: m for b, m in mults.items()}, box)


def peterson_mult(slice_: KMSlice, beta: RootVec) -> int:
    return slice_.peterson_mult(beta)


def freudenthal_dim(slice_: KMSlice, weight: Weight, mu: Weight) -> int:
    return slice_.freudenthal_dim(weight, mu)
