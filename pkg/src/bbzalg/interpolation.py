"""Exact polynomial fitting of point counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


class InterpolationError(ArithmeticError):
    """Counts are not explained by an integer polynomial of the allowed degree."""

    def __init__(self, message: str, samples: Sequence[tuple[int, int]]):
        super().__init__(f"{message}; raw counts {list(samples)}")
        self.samples = list(samples)


@dataclass
class CountingPolynomial:
    coeffs: tuple[int, ...]  # low to high degree
    samples: list[tuple[int, int]]
    degree_bound: int
    degree_certified: bool = True
    notes: list[str] = field(default_factory=list)

    def __call__(self, t) -> int | Fraction:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c]
        return nz[-1] if nz else 0

    def to_json(self) -> dict:
        return {
            "coeffs": [str(c) for c in self.coeffs],
            "samples": [[q, str(n)] for q, n in self.samples],
            "degree_bound": self.degree_bound,
            "degree_certified": self.degree_certified,
        }

    def __str__(self) -> str:
        terms = [f"{c}*t^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


def _lagrange(points: Sequence[tuple[int, int]]) -> list[Fraction]:
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k in range(n):
            coeffs[k] += yi * basis[k] / denom
    return coeffs


def fit_counting_polynomial(samples: Sequence[tuple[int, int]], degree_bound: int) -> CountingPolynomial:
    """Fit ``samples`` by a polynomial of degree ``<= degree_bound`` and check the rest.

    With ``len(samples) >= degree_bound + 2`` the fit uses ``degree_bound + 1``
    points and every remaining sample must match.  With fewer samples the
    degree is lowered to ``len(samples) - 2`` so at least one sample still
    checks the fit; the result is then flagged ``degree_certified=False``.
    """
    samples = sorted({(int(q), int(n)) for q, n in samples})
    if len(samples) < 2:
        raise InterpolationError("need at least two samples", samples)
    degree_bound = max(degree_bound, 0)
    certified = len(samples) >= degree_bound + 2
    deg = degree_bound if certified else len(samples) - 2
    fit_pts, check_pts = samples[: deg + 1], samples[deg + 1 :]
    coeffs = _lagrange(fit_pts)
    if any(c.denominator != 1 for c in coeffs):
        raise InterpolationError(f"non-integral coefficients {coeffs}", samples)
    ints = tuple(int(c) for c in coeffs)
    poly = CountingPolynomial(ints, samples, degree_bound, certified)
    for q, n in check_pts:
        if poly(q) != n:
            raise InterpolationError(f"fit {poly} misses sample q={q} (count {n})", samples)
    while len(ints) > 1 and ints[-1] == 0:
        ints = ints[:-1]
    poly.coeffs = ints
    if not certified:
        poly.notes.append(
            f"only {len(samples)} samples for degree bound {degree_bound}; fitted degree <= {deg} and checked on the rest"
        )
    return poly
