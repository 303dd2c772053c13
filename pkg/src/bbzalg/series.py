"""Truncated formal power series in ``e^{-alpha_i}`` with exact rational coefficients.

A key ``beta`` (a :class:`RootVec`) stands for the monomial ``e^{-beta}``.
Every series carries a :class:`DegreeBox`; terms outside the box are dropped
by every operation, so results are exact inside the box.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .cartan import RootVec, Vec, Vertex, root_sort_key, vertex_key

Number = int | Fraction


class DegreeBox:
    """Componentwise upper bound on root-lattice degrees."""

    __slots__ = ("_limits", "_hash")

    def __init__(self, limits: Mapping[Vertex, int]):
        items = tuple(sorted(((v, int(k)) for v, k in dict(limits).items()), key=lambda t: vertex_key(t[0])))
        for v, k in items:
            if k < 0:
                raise ValueError(f"negative box limit at {v!r}")
        self._limits = dict(items)
        self._hash = hash(items)

    @classmethod
    def of(cls, alpha: Vec) -> "DegreeBox":
        return cls(dict(alpha.items))

    @property
    def limits(self) -> dict[Vertex, int]:
        return dict(self._limits)

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self._limits)

    def limit(self, v: Vertex) -> int:
        return self._limits.get(v, 0)

    def contains(self, beta: Vec) -> bool:
        lim = self._limits
        for v, k in beta.items:
            if k < 0 or k > lim.get(v, 0):
                return False
        return True

    __contains__ = contains

    def restrict(self, vertices: Iterable[Vertex]) -> "DegreeBox":
        keep = set(vertices)
        return DegreeBox({v: k for v, k in self._limits.items() if v in keep})

    def max_height(self) -> int:
        return sum(self._limits.values())

    def points(self) -> list[RootVec]:
        """All lattice points of the box, sorted by height."""
        vs = list(self._limits)
        ranges = [range(self._limits[v] + 1) for v in vs]
        pts = [RootVec(zip(vs, c)) for c in itertools.product(*ranges)]
        pts.sort(key=root_sort_key)
        return pts

    def __eq__(self, other) -> bool:
        return isinstance(other, DegreeBox) and self._limits == other._limits

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DegreeBox({self._limits!r})"


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class FormalSeries:
    """Sparse series ``sum c_beta e^{-beta}`` truncated to a :class:`DegreeBox`."""

    __slots__ = ("terms", "box")

    def __init__(self, terms: Mapping[RootVec, Number] | None = None, box: DegreeBox | None = None):
        if box is None:
            raise ValueError("FormalSeries needs an explicit DegreeBox")
        self.box = box
        clean: dict[RootVec, Fraction] = {}
        for k, c in (terms or {}).items():
            if not isinstance(k, RootVec):
                k = RootVec(dict(k.items) if isinstance(k, Vec) else k)
            if c and box.contains(k):
                clean[k] = clean.get(k, Fraction(0)) + _frac(c)
        self.terms = {k: c for k, c in clean.items() if c}

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, box: DegreeBox) -> "FormalSeries":
        return cls({}, box)

    @classmethod
    def one(cls, box: DegreeBox) -> "FormalSeries":
        return cls({RootVec(): 1}, box)

    @classmethod
    def monomial(cls, beta: RootVec, coeff: Number, box: DegreeBox) -> "FormalSeries":
        return cls({beta: coeff}, box)

    @classmethod
    def _trusted(cls, terms: dict, box: DegreeBox) -> "FormalSeries":
        s = cls.__new__(cls)
        s.terms = terms
        s.box = box
        return s

    # -- access -----------------------------------------------------------------
    def coeff(self, beta: Vec | Mapping[Vertex, int]) -> Fraction:
        if not isinstance(beta, Vec):
            beta = RootVec(beta)
        return self.terms.get(RootVec(beta.items) if not isinstance(beta, RootVec) else beta, Fraction(0))

    __getitem__ = coeff

    def constant(self) -> Fraction:
        return self.terms.get(RootVec(), Fraction(0))

    def __iter__(self) -> Iterator[tuple[RootVec, Fraction]]:
        for k in sorted(self.terms, key=root_sort_key):
            yield k, self.terms[k]

    def __len__(self) -> int:
        return len(self.terms)

    def _same_box(self, other: "FormalSeries") -> DegreeBox:
        if self.box != other.box:
            raise ValueError("series live in different degree boxes")
        return self.box

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        box = self._same_box(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return FormalSeries._trusted(out, box)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries._trusted({k: -c for k, c in self.terms.items()}, self.box)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def scale(self, c: Number) -> "FormalSeries":
        c = _frac(c)
        if not c:
            return FormalSeries.zero(self.box)
        return FormalSeries._trusted({k: c * v for k, v in self.terms.items()}, self.box)

    def __mul__(self, other) -> "FormalSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        box = self._same_box(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        lim = box._limits
        out: dict[RootVec, Fraction] = {}
        b_items = [(dict(k.items), c) for k, c in b.items()]
        for ka, ca in a.items():
            da = ka.items
            for db, cb in b_items:
                merged = dict(db)
                ok = True
                for v, k in da:
                    t = merged.get(v, 0) + k
                    if t > lim.get(v, 0):
                        ok = False
                        break
                    merged[v] = t
                if not ok:
                    continue
                key = RootVec._raw(tuple(sorted(merged.items(), key=lambda t: vertex_key(t[0]))))
                val = out.get(key, 0) + ca * cb
                if val:
                    out[key] = val
                else:
                    out.pop(key, None)
        return FormalSeries._trusted(out, box)

    __rmul__ = __mul__

    def inverse(self) -> "FormalSeries":
        c0 = self.constant()
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = 1 / c0
        pts = self.box.points()
        rest = [(k, c) for k, c in self.terms.items() if k]
        out: dict[RootVec, Fraction] = {}
        for beta in pts:
            if beta.is_zero():
                out[beta] = inv0
                continue
            acc = Fraction(0)
            for k, c in rest:
                if k.le(beta):
                    prev = out.get((beta - k).to_root())
                    if prev:
                        acc += c * prev
            if acc:
                out[beta] = -inv0 * acc
        return FormalSeries._trusted({k: v for k, v in out.items() if v}, self.box)

    def __pow__(self, n: int) -> "FormalSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = FormalSeries.one(self.box)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def neg_log_one_minus(self) -> "FormalSeries":
        """``-log(1 - u) = sum_{n>=1} u^n / n`` for ``u`` with zero constant term."""
        if self.constant():
            raise ValueError("neg_log_one_minus needs a series with zero constant term")
        total = FormalSeries.zero(self.box)
        power = self
        n = 1
        while power.terms:
            total = total + power.scale(Fraction(1, n))
            power = power * self
            n += 1
        return total

    def exp(self) -> "FormalSeries":
        """``exp(u)`` for ``u`` with zero constant term."""
        if self.constant():
            raise ValueError("exp needs a series with zero constant term")
        total = FormalSeries.one(self.box)
        power = FormalSeries.one(self.box)
        n = 1
        fact = 1
        while True:
            power = power * self
            if not power.terms:
                break
            total = total + power.scale(Fraction(1, fact * n))
            fact *= n
            n += 1
        return total

    def shifted(self, beta: RootVec) -> "FormalSeries":
        """Multiply by ``e^{-beta}``."""
        return FormalSeries({k + beta: c for k, c in self.terms.items()}, self.box)

    def restricted(self, box: DegreeBox) -> "FormalSeries":
        return FormalSeries(self.terms, box)

    # -- comparison / IO ------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSeries) and self.box == other.box and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def to_records(self) -> list[dict]:
        recs = []
        for k, c in self:
            recs.append(
                {
                    "exp": {str(v): n for v, n in k.items},
                    "num": str(c.numerator),
                    "den": str(c.denominator),
                }
            )
        return recs

    def to_json(self) -> str:
        return json.dumps(self.to_records(), sort_keys=True)

    def __str__(self) -> str:
        """One ``coeff * e^{-(k1 a[v1] + ...)}`` line per term, sorted by degree."""
        lines = []
        for k, c in self:
            num = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            if k.is_zero():
                lines.append(num)
            else:
                expo = " + ".join(f"{n} a[{v}]" for v, n in k.items)
                lines.append(f"{num} * e^{{-({expo})}}")
        return "\n".join(lines) if lines else "0"

    def __repr__(self) -> str:
        body = ", ".join(f"{dict(k.items)}: {c}" for k, c in self)
        return f"FormalSeries({{{body}}}, {self.box!r})"


def series_from_records(records: Iterable[Mapping], box: DegreeBox, vertex_parser=None) -> FormalSeries:
    """Inverse of :meth:`FormalSeries.to_records`."""
    parse = vertex_parser or _parse_vertex
    terms = {}
    for r in records:
        key = RootVec({parse(v): int(n) for v, n in r["exp"].items()})
        terms[key] = terms.get(key, 0) + Fraction(int(r["num"]), int(r["den"]))
    return FormalSeries(terms, box)


def _parse_vertex(s: str):
    try:
        return int(s)
    except ValueError:
        return s
