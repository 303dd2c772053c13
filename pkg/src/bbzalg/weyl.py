"""Weyl group action and enumeration of minimal coset representatives W(J)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .cartan import BorcherdsCartanDatum, DatumError, RootVec, Vec, Vertex, Weight, vertex_key
from .series import DegreeBox

DEFAULT_ELEMENT_CAP = 200_000


@dataclass(frozen=True)
class WeylElement:
    """A reduced word ``(i1, ..., ik)`` meaning ``r_{i1} r_{i2} ... r_{ik}``.

    ``rho_shift`` caches ``rho - w(rho)``, which lies in Q+ and identifies the
    element.
    """

    word: tuple = ()
    rho_shift: RootVec = field(default_factory=RootVec)

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if len(self.word) % 2 else 1

    def __repr__(self) -> str:
        return f"WeylElement({list(self.word)!r})"


def _require_real(datum: BorcherdsCartanDatum, i: Vertex) -> None:
    if not datum.is_real(i):
        raise DatumError(f"reflection needs a real vertex, got {i!r}")


def reflect(datum: BorcherdsCartanDatum, i: Vertex, weight: Weight) -> Weight:
    _require_real(datum, i)
    return weight.shifted(Vec({i: -weight.pairing(datum, i)}))


def reflect_root(datum: BorcherdsCartanDatum, i: Vertex, v: Vec) -> Vec:
    _require_real(datum, i)
    c = datum.pairing(i, v)
    return v - Vec({i: c}) if c else v


def apply(datum: BorcherdsCartanDatum, w: WeylElement | Iterable[Vertex], weight: Weight) -> Weight:
    word = w.word if isinstance(w, WeylElement) else tuple(w)
    for i in reversed(word):
        weight = reflect(datum, i, weight)
    return weight


def apply_root(datum: BorcherdsCartanDatum, w: WeylElement | Iterable[Vertex], v: Vec) -> Vec:
    word = w.word if isinstance(w, WeylElement) else tuple(w)
    for i in reversed(word):
        v = reflect_root(datum, i, v)
    return v


def enumerate_WJ(
    datum: BorcherdsCartanDatum,
    J: Iterable[Vertex] = (),
    depth: int | None = None,
    box: DegreeBox | None = None,
    cap: int = DEFAULT_ELEMENT_CAP,
) -> list[WeylElement]:
    """Minimal-length coset representatives, grown one reflection at a time.

    ``w`` is extended by ``r_j`` when ``w(alpha_j)`` is a positive root whose
    support leaves ``J``.  With ``box`` given, a branch is cut as soon as
    ``rho - w(rho)`` leaves the box; this quantity only grows along a branch.
    """
    J = frozenset(J)
    for j in J:
        if j not in datum:
            raise DatumError(f"J vertex {j!r} outside the datum window")
        _require_real(datum, j)
    if depth is None and box is None:
        raise ValueError("enumerate_WJ needs a depth or a box bound")
    gens = sorted(datum.real_vertices, key=vertex_key)

    identity = WeylElement((), RootVec())
    seen = {identity.rho_shift}
    result = [identity]
    frontier = [identity]
    level = 0
    while frontier and (depth is None or level < depth):
        nxt: list[WeylElement] = []
        for w in frontier:
            for j in gens:
                image = apply_root(datum, w, Vec.simple(j))
                if not image.is_nonneg():
                    continue
                if all(v in J for v in image.support()):
                    continue
                shift = w.rho_shift + image.to_root()
                if shift in seen:
                    continue
                if box is not None and not box.contains(shift):
                    continue
                seen.add(shift)
                nxt.append(WeylElement(w.word + (j,), shift))
        nxt.sort(key=lambda e: tuple(vertex_key(v) for v in e.word))
        result.extend(nxt)
        if len(result) > cap:
            raise OverflowError(f"W(J) enumeration exceeded {cap} elements")
        frontier = nxt
        level += 1
    return result


def enumerate_W(datum: BorcherdsCartanDatum, depth: int | None = None, box: DegreeBox | None = None) -> list[WeylElement]:
    return enumerate_WJ(datum, (), depth=depth, box=box)
