"""Root multiplicities, denominator identities and characters of Borcherds-Bozec algebras.

Pipeline for a datum, a set ``J`` of real vertices and a degree box:

1. enumerate minimal coset representatives ``W(J)`` and imaginary supports ``F_0``;
2. assemble the virtual module ``V^(J)`` from characters of the Kac-Moody slice;
3. take ``-log(1 - ch V^(J))`` to get Witt values;
4. Moebius-invert to root multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Literal

from .cartan import (
    BorcherdsCartanDatum,
    DatumError,
    Kind,
    RootVec,
    Vec,
    Vertex,
    Weight,
    divisors_of,
    mobius,
    root_sort_key,
    vertex_key,
)
from .kmweights import KMSlice, ch_VJ
from .series import DegreeBox, FormalSeries
from .weyl import WeylElement, apply, apply_root, enumerate_WJ


class InvariantBreach(ArithmeticError):
    """A quantity that must be a nonnegative integer (or dominant weight) is not."""


# -- charge weights ------------------------------------------------------------


@lru_cache(maxsize=None)
def _euler_product_coeffs(f: int, n: int) -> tuple[int, ...]:
    base = [0] * (n + 1)
    base[0] = 1
    for k in range(1, n + 1):
        for d in range(n, k - 1, -1):
            base[d] -= base[d - k]

    def mul(a, b):
        out = [0] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b[j]
        return out

    result = [1] + [0] * n
    power = base
    e = f
    while e:
        if e & 1:
            result = mul(result, power)
        e >>= 1
        if e:
            power = mul(power, power)
    return tuple(result)


def euler_phi_power(f: int, n: int) -> int:
    """Coefficient of ``q^n`` in ``prod_{k>=1} (1 - q^k)^f``."""
    if f < 0 or n < 0:
        raise ValueError("euler_phi_power needs f >= 0 and n >= 0")
    return _euler_product_coeffs(f, n)[n]


@dataclass(frozen=True)
class ImaginarySupport:
    """Sum of mutually orthogonal imaginary simple roots, stored by per-vertex totals.

    ``parts`` holds ``(vertex, value)``: a single part ``l`` for a
    non-isotropic vertex, the collapsed total ``t`` for an isotropic one.
    """

    parts: tuple[tuple[Vertex, int], ...] = ()
    isotropic: frozenset = frozenset()

    @property
    def total(self) -> RootVec:
        return RootVec(self.parts)

    @property
    def d_plus(self) -> int:
        return sum(1 for v, _ in self.parts if v not in self.isotropic)

    def is_zero(self) -> bool:
        return not self.parts


def enumerate_F(datum: BorcherdsCartanDatum, weight: Weight | None, box: DegreeBox) -> list[ImaginarySupport]:
    """Imaginary supports inside ``box``; with ``weight`` given, also orthogonal to it."""
    cands = []
    for v in sorted(datum.imaginary_vertices, key=vertex_key):
        if box.limit(v) <= 0:
            continue
        if weight is not None and weight.pairing(datum, v) != 0:
            continue
        cands.append(v)
    iso = frozenset(v for v in cands if datum.classify(v) is Kind.ISOTROPIC)
    out: list[ImaginarySupport] = []

    def grow(start: int, chosen: list[tuple[Vertex, int]]) -> None:
        out.append(ImaginarySupport(tuple(chosen), iso))
        for p in range(start, len(cands)):
            v = cands[p]
            if any(datum.a(v, u) != 0 for u, _ in chosen):
                continue
            for val in range(1, box.limit(v) + 1):
                chosen.append((v, val))
                grow(p + 1, chosen)
                chosen.pop()

    grow(0, [])
    return out


def support_weight(datum: BorcherdsCartanDatum, s: ImaginarySupport) -> int:
    """Charge weight of a support; the sign of the virtual-module term is applied by the caller."""
    w = 1
    for v, val in s.parts:
        if datum.a(v, v) == 0:
            w *= euler_phi_power(datum.f(v), val)
        else:
            w *= datum.f(v)
    return w


def support_sign(datum: BorcherdsCartanDatum, s: ImaginarySupport) -> int:
    """Full signed weight ``(-1)^{d(s+)} * support_weight`` used in the numerators."""
    return (-1) ** s.d_plus * support_weight(datum, s)


def s_lambda_series(datum: BorcherdsCartanDatum, weight: Weight, box: DegreeBox) -> FormalSeries:
    terms: dict[RootVec, int] = {}
    for s in enumerate_F(datum, weight, box):
        key = s.total
        terms[key] = terms.get(key, 0) + support_sign(datum, s)
    return FormalSeries(terms, box)


# -- virtual module -----------------------------------------------------------


@dataclass
class VirtualModule:
    """Virtual dimensions ``d_mu`` keyed by ``-mu`` in Q+."""

    entries: dict[RootVec, Fraction]
    J: frozenset
    box: DegreeBox

    def character(self) -> FormalSeries:
        return FormalSeries(self.entries, self.box)

    def weights(self) -> list[RootVec]:
        return sorted((k for k, v in self.entries.items() if v), key=root_sort_key)

    def __getitem__(self, key: RootVec) -> Fraction:
        return self.entries.get(key, Fraction(0))


def _check_J(datum: BorcherdsCartanDatum, J: Iterable[Vertex]) -> frozenset:
    J = frozenset(J)
    for j in J:
        if j not in datum:
            raise DatumError(f"J vertex {j!r} outside the datum window")
        if not datum.is_real(j):
            raise DatumError(f"J vertex {j!r} is not real")
    return J


def virtual_module(
    datum: BorcherdsCartanDatum,
    J: Iterable[Vertex],
    box: DegreeBox,
    *,
    slice_: KMSlice | None = None,
    coset_reps: list[WeylElement] | None = None,
) -> VirtualModule:
    J = _check_J(datum, J)
    if slice_ is None:
        slice_ = KMSlice(datum, J, box)
    if coset_reps is None:
        coset_reps = enumerate_WJ(datum, J, box=box)
    supports = enumerate_F(datum, None, box)
    entries: dict[RootVec, Fraction] = {}
    for w in coset_reps:
        for s in supports:
            if w.length == 0 and s.is_zero():
                continue
            ws = apply_root(datum, w, s.total)
            if not ws.is_nonneg() and not ws.is_zero():
                raise InvariantBreach(f"w(s) not positive for w={w}, s={s}")
            key = w.rho_shift + ws.to_root()
            if not box.contains(key):
                continue
            top = Weight("zero", -key)
            for j in J:
                if top.pairing(datum, j) < 0:
                    raise InvariantBreach(
                        f"highest weight -({key}) from w={list(w.word)}, s={s.parts} is not J-dominant at {j!r}"
                    )
            coeff = (-1) ** (w.length + s.d_plus + 1) * support_weight(datum, s)
            for k, m in ch_VJ(slice_, top, box, shift=key).terms.items():
                val = entries.get(k, 0) + coeff * m
                if val:
                    entries[k] = Fraction(val)
                else:
                    entries.pop(k, None)
    return VirtualModule(entries, J, box)


# -- Witt functions -----------------------------------------------------------


def witt_log_series(vm: VirtualModule) -> FormalSeries:
    return vm.character().neg_log_one_minus()


def witt_partitions(vm: VirtualModule, beta: RootVec) -> Fraction:
    """Direct sum over multiset partitions of ``beta`` into weights of ``vm``."""
    parts = [(k, d) for k, d in ((k, vm.entries[k]) for k in vm.weights()) if d and k.le(beta)]
    total = Fraction(0)

    def rec(idx: int, remaining: Vec, counts: list[int], prod: Fraction) -> None:
        nonlocal total
        if remaining.is_zero():
            n = sum(counts)
            denom = 1
            for c in counts:
                denom *= math.factorial(c)
            total += Fraction(math.factorial(n - 1), denom) * prod
            return
        if idx == len(parts):
            return
        key, d = parts[idx]
        rec(idx + 1, remaining, counts, prod)
        rem = remaining
        c = 0
        p = prod
        while True:
            rem = rem - key
            if not (rem.is_nonneg() or rem.is_zero()):
                break
            c += 1
            p = p * d
            counts.append(c)
            rec(idx + 1, rem, counts, p)
            counts.pop()

    rec(0, Vec(beta.items), [], Fraction(1))
    return total


def witt(vm: VirtualModule, beta: RootVec, method: Literal["log", "partitions", "both"] = "log") -> Fraction:
    if method == "partitions":
        return witt_partitions(vm, beta)
    box = DegreeBox.of(beta)
    log_val = FormalSeries(vm.entries, box).neg_log_one_minus().coeff(beta)
    if method == "both":
        part_val = witt_partitions(vm, beta)
        if part_val != log_val:
            raise InvariantBreach(f"Witt mismatch at {beta}: partitions {part_val} vs log {log_val}")
    return log_val


# -- multiplicities -------------------------------------------------------------


class MultiplicityEngine:
    """Caches the pipeline for one ``(datum, J, box)``."""

    def __init__(self, datum: BorcherdsCartanDatum, J: Iterable[Vertex], box: DegreeBox):
        self.datum = datum
        self.J = _check_J(datum, J)
        self.box = box
        self.slice = KMSlice(datum, self.J, box)
        self.coset_reps = enumerate_WJ(datum, self.J, box=box)
        self.vm = virtual_module(datum, self.J, box, slice_=self.slice, coset_reps=self.coset_reps)
        self.witt_series = witt_log_series(self.vm)
        self._mult: dict[RootVec, int] = {}

    def witt(self, beta: RootVec) -> Fraction:
        return self.witt_series.coeff(beta)

    def multiplicity(self, alpha: RootVec) -> int:
        if alpha.is_zero():
            raise ValueError("root_multiplicity of the zero vector")
        if not self.box.contains(alpha):
            raise ValueError(f"{alpha} outside the box {self.box}")
        if alpha in self._mult:
            return self._mult[alpha]
        if all(v in self.J for v in alpha.support()):
            val = self.slice.peterson_mult(alpha)
        else:
            acc = Fraction(0)
            for d in divisors_of(alpha):
                mu = mobius(d)
                if mu:
                    acc += Fraction(mu, d) * self.witt(RootVec({v: k // d for v, k in alpha.items}))
            if acc.denominator != 1 or acc < 0:
                raise InvariantBreach(f"multiplicity at {alpha} is {acc}, not a nonnegative integer")
            val = int(acc)
        self._mult[alpha] = val
        return val

    def table(self) -> dict[RootVec, int]:
        return {a: self.multiplicity(a) for a in self.box.points() if not a.is_zero()}

    def positive_roots(self) -> list[tuple[RootVec, int]]:
        return [(a, m) for a, m in self.table().items() if m > 0]


def root_multiplicity(datum: BorcherdsCartanDatum, J: Iterable[Vertex], alpha: RootVec, box: DegreeBox | None = None) -> int:
    box = box or DegreeBox.of(alpha)
    return MultiplicityEngine(datum, J, box).multiplicity(alpha)


def multiplicity_table(datum: BorcherdsCartanDatum, J: Iterable[Vertex], box: DegreeBox) -> dict[RootVec, int]:
    return MultiplicityEngine(datum, J, box).table()


def denominator_product(roots: Iterable[tuple[RootVec, int]], box: DegreeBox) -> FormalSeries:
    prod = FormalSeries.one(box)
    for alpha, m in roots:
        if m:
            factor = FormalSeries({RootVec(): 1, alpha: -1}, box)
            prod = prod * factor**m
    return prod


def denominator_numerator(datum: BorcherdsCartanDatum, box: DegreeBox) -> FormalSeries:
    """``sum_{w, s in F_0} eps(w) eps(s) e^{w(rho - s) - rho}`` truncated to ``box``."""
    terms: dict[RootVec, int] = {}
    supports = enumerate_F(datum, None, box)
    for w in enumerate_WJ(datum, (), box=box):
        for s in supports:
            key = w.rho_shift + apply_root(datum, w, s.total).to_root()
            if box.contains(key):
                terms[key] = terms.get(key, 0) + w.sign * support_sign(datum, s)
    return FormalSeries(terms, box)


@dataclass
class DenominatorReport:
    passed: bool
    J: frozenset
    box: DegreeBox
    multiplicities: dict[RootVec, int]
    first_mismatch: tuple[RootVec, Fraction, Fraction] | None = None
    full_identity_passed: bool | None = None


def _first_mismatch(lhs: FormalSeries, rhs: FormalSeries):
    for key in sorted(set(lhs.terms) | set(rhs.terms), key=root_sort_key):
        if lhs.coeff(key) != rhs.coeff(key):
            return key, lhs.coeff(key), rhs.coeff(key)
    return None


def verify_denominator(
    datum: BorcherdsCartanDatum,
    J: Iterable[Vertex],
    box: DegreeBox,
    *,
    multiplicity_override: dict[RootVec, int] | None = None,
) -> DenominatorReport:
    """Check the twisted identity over roots outside the slice, then the full identity.

    ``multiplicity_override`` replaces computed multiplicities before the
    products are formed (used to exercise the failure path).
    """
    engine = MultiplicityEngine(datum, J, box)
    table = engine.table()
    if multiplicity_override:
        table = {**table, **multiplicity_override}
    outside = [(a, m) for a, m in table.items() if not all(v in engine.J for v in a.support())]
    lhs = denominator_product(outside, box)
    rhs = FormalSeries.one(box) - engine.vm.character()
    bad = _first_mismatch(lhs, rhs)
    full_lhs = denominator_product(table.items(), box)
    full_rhs = denominator_numerator(datum, box)
    full_bad = _first_mismatch(full_lhs, full_rhs)
    if bad is None and full_bad is not None:
        bad = full_bad
    return DenominatorReport(bad is None and full_bad is None, engine.J, box, table, bad, full_bad is None)


# -- characters ---------------------------------------------------------------


def bbz_character(
    datum: BorcherdsCartanDatum,
    weight: Weight,
    box: DegreeBox,
    J: Iterable[Vertex] = (),
) -> FormalSeries:
    """Character of the irreducible highest-weight module, keyed by ``weight - mu``."""
    for v in datum.vertices:
        if weight.pairing(datum, v) < 0:
            raise DatumError(f"weight is not dominant at {v!r}")
    base = {v: weight.pairing(datum, v) + 1 for v in datum.vertices}
    terms: dict[RootVec, int] = {}
    supports = enumerate_F(datum, weight, box)
    coset = enumerate_WJ(datum, (), box=box)
    for s in supports:
        nu = Weight(base, -s.total)
        sign_s = support_sign(datum, s)
        for w in coset:
            image = apply(datum, w, nu)
            key = -image.offset
            if not key.is_nonneg() and not key.is_zero():
                raise InvariantBreach(f"character numerator key {key} not in Q+")
            key = key.to_root()
            if box.contains(key):
                terms[key] = terms.get(key, 0) + w.sign * sign_s
    numerator = FormalSeries(terms, box)
    engine = MultiplicityEngine(datum, J, box)
    denom = denominator_product(engine.table().items(), box)
    ch = numerator * denom.inverse()
    for key, c in ch.terms.items():
        if c.denominator != 1 or c < 0:
            raise InvariantBreach(f"character coefficient {c} at {key} is not a nonnegative integer")
    return ch
