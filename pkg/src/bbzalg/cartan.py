"""Borcherds-Cartan data, root-lattice vectors and weights.

A datum is a (possibly rule-generated) symmetrizable Borcherds-Cartan matrix
seen through a finite *window* of vertices.  Everything downstream works
inside that window; touching an index outside it is an error rather than a
silent truncation.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from math import gcd
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Vertex = Hashable

DEFAULT_CHARGE_CAP = 64


class DatumError(ValueError):
    """Invalid Borcherds-Cartan datum or out-of-window access."""


class ChargeCapError(DatumError):
    """Index expansion of a charged datum would exceed the configured cap."""


def vertex_key(v: Vertex):
    # Total order on mixed vertex ids (ints, strings, tuples from charge expansion).
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, tuple):
        return (2, tuple(vertex_key(x) for x in v))
    return (3, repr(v))


class Vec:
    """Finitely supported integer vector over vertices (immutable, hashable)."""

    __slots__ = ("_items", "_hash", "_map")

    def __init__(self, coeffs: Mapping[Vertex, int] | Iterable[tuple[Vertex, int]] = ()):
        if isinstance(coeffs, Mapping):
            pairs = coeffs.items()
        else:
            pairs = coeffs
        acc: dict[Vertex, int] = {}
        for v, k in pairs:
            if k:
                acc[v] = acc.get(v, 0) + int(k)
        items = tuple(sorted(((v, k) for v, k in acc.items() if k), key=lambda t: vertex_key(t[0])))
        self._items = items
        self._hash = hash(items)
        self._map = None
        self._check()

    def _check(self) -> None:
        pass

    @classmethod
    def _raw(cls, items: tuple):
        obj = cls.__new__(cls)
        obj._items = items
        obj._hash = hash(items)
        obj._map = None
        return obj

    @classmethod
    def simple(cls, v: Vertex, k: int = 1):
        return cls({v: k})

    @property
    def items(self) -> tuple[tuple[Vertex, int], ...]:
        return self._items

    def as_dict(self) -> dict[Vertex, int]:
        if self._map is None:
            self._map = dict(self._items)
        return self._map

    def __getitem__(self, v: Vertex) -> int:
        return self.as_dict().get(v, 0)

    def support(self) -> tuple[Vertex, ...]:
        return tuple(v for v, _ in self._items)

    def height(self) -> int:
        return sum(k for _, k in self._items)

    def is_zero(self) -> bool:
        return not self._items

    def is_nonneg(self) -> bool:
        return all(k > 0 for _, k in self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vec):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __iter__(self) -> Iterator[tuple[Vertex, int]]:
        return iter(self._items)

    def _combine(self, other: "Vec", sign: int) -> dict[Vertex, int]:
        acc = dict(self._items)
        for v, k in other._items:
            acc[v] = acc.get(v, 0) + sign * k
        return acc

    def __add__(self, other: "Vec") -> "Vec":
        out = self._combine(other, 1)
        if isinstance(self, RootVec) and isinstance(other, RootVec):
            return RootVec(out)
        return Vec(out)

    def __sub__(self, other: "Vec") -> "Vec":
        return Vec(self._combine(other, -1))

    def __neg__(self) -> "Vec":
        return Vec._raw(tuple((v, -k) for v, k in self._items))

    def scale(self, c: int) -> "Vec":
        if c == 0:
            return type(self)() if c >= 0 else Vec()
        cls = type(self) if c > 0 else Vec
        return cls._raw(tuple((v, c * k) for v, k in self._items))

    def le(self, other: "Vec") -> bool:
        """Componentwise ``self <= other``."""
        d = other.as_dict()
        mine = self.as_dict()
        for v in set(d) | set(mine):
            if mine.get(v, 0) > d.get(v, 0):
                return False
        return True

    def to_root(self) -> "RootVec":
        return RootVec(self._items)

    def coeff_gcd(self) -> int:
        g = 0
        for _, k in self._items:
            g = gcd(g, k)
        return g

    def __repr__(self) -> str:
        if not self._items:
            return f"{type(self).__name__}(0)"
        return f"{type(self).__name__}({dict(self._items)!r})"

    def __str__(self) -> str:
        if not self._items:
            return "0"
        return " + ".join(f"{k}*a[{v}]" if k != 1 else f"a[{v}]" for v, k in self._items)


class RootVec(Vec):
    """Element of Q+ : nonnegative combination of simple roots."""

    __slots__ = ()

    def _check(self) -> None:
        for v, k in self._items:
            if k < 0:
                raise ValueError(f"RootVec coefficient at {v!r} is negative: {k}")

    def __lt__(self, other: "RootVec") -> bool:
        # deterministic total order: height, then lexicographic on items
        return (self.height(), _items_key(self._items)) < (other.height(), _items_key(other._items))


def _items_key(items):
    return tuple((vertex_key(v), k) for v, k in items)


def root_sort_key(r: Vec):
    return (r.height(), _items_key(r.items))


def divisors_of(alpha: Vec) -> list[int]:
    """All positive ``d`` dividing every coefficient of ``alpha``, ascending."""
    if alpha.is_zero():
        raise ValueError("divisors_of: zero vector")
    g = abs(alpha.coeff_gcd())
    return [d for d in range(1, g + 1) if g % d == 0]


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


class Kind(str, enum.Enum):
    REAL = "real"
    ISOTROPIC = "isotropic"
    IMAGINARY = "non-isotropic-imaginary"


class BorcherdsCartanDatum:
    """Symmetrizable Borcherds-Cartan matrix with charge, on a finite window.

    ``entry`` is either a square matrix (rows aligned with ``vertices``) or a
    callable ``(i, j) -> a_ij`` for rule-generated data such as the Monster.
    """

    def __init__(
        self,
        vertices: Sequence[Vertex],
        entry: Callable[[Vertex, Vertex], int] | Sequence[Sequence[int]],
        symmetrizers: Mapping[Vertex, int] | Sequence[int] | None = None,
        charge: Mapping[Vertex, int] | Sequence[int] | Callable[[Vertex], int] | None = None,
        *,
        name: str | None = None,
    ):
        self.vertices: tuple[Vertex, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise DatumError("duplicate vertex ids")
        self._index = {v: n for n, v in enumerate(self.vertices)}
        self.name = name
        n = len(self.vertices)
        if callable(entry):
            self._matrix = [[int(entry(i, j)) for j in self.vertices] for i in self.vertices]
        else:
            rows = [list(r) for r in entry]
            if len(rows) != n or any(len(r) != n for r in rows):
                raise DatumError(f"matrix must be {n}x{n}")
            self._matrix = [[int(x) for x in r] for r in rows]

        if symmetrizers is None:
            self._sym = _minimal_symmetrizer(self.vertices, self._matrix)
        elif isinstance(symmetrizers, Mapping):
            self._sym = [int(symmetrizers[v]) for v in self.vertices]
        else:
            self._sym = [int(x) for x in symmetrizers]
            if len(self._sym) != n:
                raise DatumError("symmetrizer list length mismatch")

        if charge is None:
            self._charge = [1] * n
        elif callable(charge):
            self._charge = [int(charge(v)) for v in self.vertices]
        elif isinstance(charge, Mapping):
            self._charge = [int(charge.get(v, 1)) for v in self.vertices]
        else:
            self._charge = [int(x) for x in charge]
            if len(self._charge) != n:
                raise DatumError("charge list length mismatch")
        self._validate()

    # -- construction checks -------------------------------------------------
    def _validate(self) -> None:
        A, s = self._matrix, self._sym
        for p, i in enumerate(self.vertices):
            d = A[p][p]
            if not (d == 2 or (d <= 0 and d % 2 == 0)):
                raise DatumError(f"a[{i},{i}] = {d} not in {{2, 0, -2, -4, ...}}")
            if s[p] <= 0:
                raise DatumError(f"symmetrizer s[{i}] must be positive")
            if self._charge[p] <= 0:
                raise DatumError(f"charge f({i}) must be positive")
            if d == 2 and self._charge[p] != 1:
                raise DatumError(f"real vertex {i} must have charge 1")
            for q, j in enumerate(self.vertices):
                if p == q:
                    continue
                if A[p][q] > 0:
                    raise DatumError(f"a[{i},{j}] = {A[p][q]} > 0")
                if (A[p][q] == 0) != (A[q][p] == 0):
                    raise DatumError(f"a[{i},{j}] and a[{j},{i}] disagree on vanishing")
                if s[p] * A[p][q] != s[q] * A[q][p]:
                    raise DatumError(f"D*A not symmetric at ({i},{j})")

    # -- access ----------------------------------------------------------------
    def _pos(self, i: Vertex) -> int:
        try:
            return self._index[i]
        except KeyError:
            raise DatumError(f"vertex {i!r} outside the datum window") from None

    def __contains__(self, i: Vertex) -> bool:
        return i in self._index

    def a(self, i: Vertex, j: Vertex) -> int:
        return self._matrix[self._pos(i)][self._pos(j)]

    def s(self, i: Vertex) -> int:
        return self._sym[self._pos(i)]

    def f(self, i: Vertex) -> int:
        return self._charge[self._pos(i)]

    def matrix(self) -> list[list[int]]:
        return [row[:] for row in self._matrix]

    def symmetrizers(self) -> dict[Vertex, int]:
        return dict(zip(self.vertices, self._sym))

    def charges(self) -> dict[Vertex, int]:
        return dict(zip(self.vertices, self._charge))

    def classify(self, i: Vertex) -> Kind:
        d = self.a(i, i)
        if d == 2:
            return Kind.REAL
        if d == 0:
            return Kind.ISOTROPIC
        return Kind.IMAGINARY

    def is_real(self, i: Vertex) -> bool:
        return self.a(i, i) == 2

    @property
    def real_vertices(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if self.is_real(v))

    @property
    def imaginary_vertices(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if not self.is_real(v))

    # -- bilinear form ------------------------------------------------------
    def pairing(self, i: Vertex, x: "Weight | Vec") -> int:
        """``<h_i, x>`` for a weight or root-lattice vector."""
        if isinstance(x, Weight):
            return x.pairing(self, i)
        row = self._matrix[self._pos(i)]
        total = 0
        for j, k in x.items:
            total += k * row[self._pos(j)]
        return total

    def bilinear(self, x: "Weight | Vec", beta: Vec) -> int:
        """``(x, beta)`` with ``(alpha_i, lam) = s_i <h_i, lam>``."""
        total = 0
        for i, k in beta.items:
            total += k * self.s(i) * self.pairing(i, x)
        return total

    def restrict(self, vertices: Iterable[Vertex]) -> "BorcherdsCartanDatum":
        vs = [v for v in self.vertices if v in set(vertices)]
        return BorcherdsCartanDatum(
            vs,
            lambda i, j: self.a(i, j),
            {v: self.s(v) for v in vs},
            {v: self.f(v) for v in vs},
            name=self.name,
        )

    def __repr__(self) -> str:
        label = self.name or "datum"
        return f"<BorcherdsCartanDatum {label} on {list(self.vertices)!r}>"


def _minimal_symmetrizer(vertices, A) -> list[int]:
    n = len(vertices)
    sym: list[Fraction | None] = [None] * n
    for root in range(n):
        if sym[root] is not None:
            continue
        sym[root] = Fraction(1)
        comp = [root]
        stack = [root]
        while stack:
            p = stack.pop()
            for q in range(n):
                if q == p or A[p][q] == 0:
                    continue
                if A[q][p] == 0:
                    raise DatumError("a_ij = 0 iff a_ji = 0 violated")
                val = sym[p] * A[p][q] / A[q][p]
                if sym[q] is None:
                    sym[q] = val
                    comp.append(q)
                    stack.append(q)
                elif sym[q] != val:
                    raise DatumError("matrix is not symmetrizable in this window")
        den = 1
        for p in comp:
            den = den * sym[p].denominator // gcd(den, sym[p].denominator)
        ints = [int(sym[p] * den) for p in comp]
        g = 0
        for x in ints:
            g = gcd(g, x)
        for p, x in zip(comp, ints):
            sym[p] = Fraction(x // g)
    return [int(x) for x in sym]


class Weight:
    """Symbolic base (zero, rho, or given coroot pairings) plus a root-lattice offset."""

    __slots__ = ("base", "offset")

    def __init__(self, base: str | Mapping[Vertex, int] = "zero", offset: Vec | Mapping[Vertex, int] | None = None):
        if isinstance(base, str):
            if base not in ("zero", "rho"):
                raise ValueError(f"unknown weight base {base!r}")
            self.base = base
        else:
            self.base = tuple(sorted(((v, int(k)) for v, k in dict(base).items()), key=lambda t: vertex_key(t[0])))
        if offset is None:
            offset = Vec()
        elif not isinstance(offset, Vec):
            offset = Vec(offset)
        self.offset = Vec(offset.items)

    @classmethod
    def zero(cls) -> "Weight":
        return cls("zero")

    @classmethod
    def rho(cls) -> "Weight":
        return cls("rho")

    def base_pairing(self, i: Vertex) -> int:
        if self.base == "zero":
            return 0
        if self.base == "rho":
            return 1
        return dict(self.base).get(i, 0)

    def pairing(self, datum: BorcherdsCartanDatum, i: Vertex) -> int:
        return self.base_pairing(i) + datum.pairing(i, self.offset)

    def shifted(self, delta: Vec) -> "Weight":
        w = Weight.__new__(Weight)
        w.base = self.base
        w.offset = self.offset + delta
        return w

    def __eq__(self, other) -> bool:
        return isinstance(other, Weight) and self.base == other.base and self.offset == other.offset

    def __hash__(self) -> int:
        return hash((self.base, self.offset))

    def __repr__(self) -> str:
        b = self.base if isinstance(self.base, str) else dict(self.base)
        return f"Weight(base={b!r}, offset={self.offset})"


def classify(datum: BorcherdsCartanDatum, i: Vertex) -> Kind:
    return datum.classify(i)


def bilinear(datum: BorcherdsCartanDatum, x: Weight | Vec, beta: Vec) -> int:
    return datum.bilinear(x, beta)


def expand_charge(datum: BorcherdsCartanDatum, cap: int = DEFAULT_CHARGE_CAP) -> BorcherdsCartanDatum:
    """Replace each vertex ``i`` by copies ``(i, 1..f(i))`` with constant blocks."""
    if all(f == 1 for f in datum.charges().values()):
        return datum
    total = sum(datum.charges().values())
    if total > cap:
        raise ChargeCapError(
            f"charge expansion needs {total} indices (cap {cap}); use native charge weights instead"
        )
    new_vertices = [(i, p) for i in datum.vertices for p in range(1, datum.f(i) + 1)]
    return BorcherdsCartanDatum(
        new_vertices,
        lambda x, y: datum.a(x[0], y[0]),
        {x: datum.s(x[0]) for x in new_vertices},
        None,
        name=f"{datum.name or 'datum'}~",
    )


def collapse(vec: Vec) -> Vec:
    """Map a vector over expanded indices ``(i, p)`` back to the vertex ``i``."""
    acc: dict[Vertex, int] = {}
    for (i, _p), k in vec.items:
        acc[i] = acc.get(i, 0) + k
    return type(vec)(acc) if isinstance(vec, RootVec) else Vec(acc)


def cartan_datum(matrix: Sequence[Sequence[int]], vertices: Sequence[Vertex] | None = None, **kw) -> BorcherdsCartanDatum:
    """Convenience constructor from an explicit matrix (vertices default to 0..n-1)."""
    if vertices is None:
        vertices = list(range(len(matrix)))
    return BorcherdsCartanDatum(vertices, matrix, **kw)
