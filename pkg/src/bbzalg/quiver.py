"""Quivers with loops and exhaustive counting of their representations over F_q."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .bbzmult import MultiplicityEngine
from .cartan import BorcherdsCartanDatum, RootVec, Vertex, vertex_key
from .finite_field import GF, field as get_field, nullspace
from .interpolation import CountingPolynomial, fit_counting_polynomial
from .series import DegreeBox

DEFAULT_POINT_CAP = 1 << 24
DEFAULT_END_CAP = 1 << 20
DEFAULT_SAMPLE_FIELDS = (2, 3, 4, 5)


class CapExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class Arrow:
    id: Hashable
    out: Vertex
    into: Vertex

    @property
    def is_loop(self) -> bool:
        return self.out == self.into


class Quiver:
    def __init__(self, vertices: Sequence[Vertex], arrows: Iterable[tuple[Vertex, Vertex]] | Iterable[Arrow]):
        self.vertices = tuple(vertices)
        arrs = []
        for n, a in enumerate(arrows):
            if not isinstance(a, Arrow):
                a = Arrow(n, a[0], a[1])
            for v in (a.out, a.into):
                if v not in self.vertices:
                    raise ValueError(f"arrow {a.id!r} touches unknown vertex {v!r}")
            arrs.append(a)
        self.arrows: tuple[Arrow, ...] = tuple(arrs)

    @classmethod
    def from_json(cls, data: Mapping) -> "Quiver":
        vertices = list(data["vertices"])
        arrows = []
        for n, a in enumerate(data.get("arrows", [])):
            arrows.append(Arrow(a.get("id", n), a["from"], a["to"]))
        return cls(vertices, arrows)

    def loops(self, i: Vertex) -> list[Arrow]:
        return [a for a in self.arrows if a.out == i and a.into == i]

    def g(self, i: Vertex) -> int:
        return len(self.loops(i))

    def c(self, i: Vertex, j: Vertex) -> int:
        return sum(1 for a in self.arrows if a.out == i and a.into == j)

    def is_imaginary(self, i: Vertex) -> bool:
        return self.g(i) > 0

    def euler_form(self, alpha: Mapping[Vertex, int], beta: Mapping[Vertex, int]) -> int:
        return sum(alpha.get(v, 0) * beta.get(v, 0) for v in self.vertices) - sum(
            alpha.get(a.out, 0) * beta.get(a.into, 0) for a in self.arrows
        )

    def __repr__(self) -> str:
        return f"Quiver({list(self.vertices)!r}, {[(a.out, a.into) for a in self.arrows]!r})"


def jordan_quiver() -> Quiver:
    return Quiver([0], [(0, 0)])


def loop_quiver(g: int) -> Quiver:
    return Quiver([0], [(0, 0)] * g)


def a2_quiver() -> Quiver:
    return Quiver([1, 2], [(1, 2)])


def cartan_of_quiver(Q: Quiver) -> BorcherdsCartanDatum:
    def entry(i, j):
        if i == j:
            return 2 - 2 * Q.g(i)
        return -Q.c(i, j) - Q.c(j, i)

    return BorcherdsCartanDatum(Q.vertices, entry, {v: 1 for v in Q.vertices}, None, name="quiver")


# -- representations ------------------------------------------------------------


@dataclass
class FqRep:
    quiver: Quiver
    q: int
    dims: dict
    maps: dict = field(default_factory=dict)  # arrow id -> (dim_in x dim_out) int array

    def __post_init__(self):
        self.dims = {v: int(self.dims.get(v, 0)) for v in self.quiver.vertices}
        for a in self.quiver.arrows:
            shape = (self.dims[a.into], self.dims[a.out])
            m = self.maps.get(a.id)
            m = np.zeros(shape, dtype=np.int64) if m is None else np.asarray(m, dtype=np.int64).reshape(shape)
            if m.shape != shape:
                raise ValueError(f"arrow {a.id!r} needs a {shape} matrix")
            self.maps[a.id] = m

    @property
    def field(self) -> GF:
        return get_field(self.q)

    @property
    def dim_vector(self) -> RootVec:
        return RootVec(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    @classmethod
    def zero(cls, quiver: Quiver, q: int, dims: Mapping[Vertex, int]) -> "FqRep":
        return cls(quiver, q, dict(dims), {})

    @classmethod
    def from_integers(cls, quiver: Quiver, q: int, dims: Mapping[Vertex, int], maps: Mapping) -> "FqRep":
        """Matrices with integer entries, mapped through ``Z -> F_p`` into ``F_q``."""
        F = get_field(q)
        conv = {k: np.vectorize(F.from_int, otypes=[np.int64])(np.asarray(v, dtype=np.int64)) if np.size(v) else np.asarray(v, dtype=np.int64) for k, v in maps.items()}
        return cls(quiver, q, dict(dims), conv)

    def code(self) -> tuple:
        return tuple(int(x) for a in self.quiver.arrows for x in self.maps[a.id].ravel())

    def direct_sum(self, other: "FqRep") -> "FqRep":
        if other.q != self.q or other.quiver is not self.quiver:
            raise ValueError("direct sum needs the same quiver and field")
        dims = {v: self.dims[v] + other.dims[v] for v in self.quiver.vertices}
        maps = {}
        for a in self.quiver.arrows:
            m = np.zeros((dims[a.into], dims[a.out]), dtype=np.int64)
            A, B = self.maps[a.id], other.maps[a.id]
            m[: A.shape[0], : A.shape[1]] = A
            m[A.shape[0] :, A.shape[1] :] = B
            maps[a.id] = m
        return FqRep(self.quiver, self.q, dims, maps)

    def base_change(self, q_ext: int) -> "FqRep":
        table = self.field.embedding_into(get_field(q_ext))
        return FqRep(self.quiver, q_ext, dict(self.dims), {k: table[v] for k, v in self.maps.items()})

    def __repr__(self) -> str:
        return f"FqRep(q={self.q}, dims={self.dims}, maps={ {k: v.tolist() for k, v in self.maps.items()} })"


# -- 1-nilpotency ---------------------------------------------------------------


def _words_vanish(loops: list[np.ndarray], n: int, F: GF) -> np.ndarray:
    """Mask of points where every product of ``n`` loop matrices is zero.

    ``loops`` holds batched (N, n, n) arrays.  The algebra generated by the
    loops is nilpotent iff these words vanish, iff the loops are
    simultaneously strictly triangularizable.
    """
    N = loops[0].shape[0]
    if n == 0:
        return np.ones(N, dtype=bool)
    words = list(loops)
    for _ in range(n - 1):
        nxt = []
        for w in words:
            for x in loops:
                nxt.append(_kernels.batch_matmul(w, x, F.add, F.mul))
        # identical products are common for a single loop; keep them all, shapes are tiny
        words = nxt
    mask = np.ones(N, dtype=bool)
    for w in words:
        mask &= ~w.reshape(N, -1).any(axis=1)
    return mask


def is_one_nilpotent(rep: FqRep) -> bool:
    F = rep.field
    for v in rep.quiver.vertices:
        loops = rep.quiver.loops(v)
        n = rep.dims[v]
        if not loops or n == 0:
            continue
        batch = [rep.maps[a.id][None, :, :] for a in loops]
        if not _words_vanish(batch, n, F)[0]:
            return False
    return True


def is_nilpotent(rep: FqRep) -> bool:
    """Every path of length ``total_dim`` acts by zero."""
    F = rep.field
    N = rep.total_dim
    paths = [(a.out, a.into, rep.maps[a.id]) for a in rep.quiver.arrows]
    if N == 0:
        return True
    for _ in range(N - 1):
        nxt = []
        for s, e, m in paths:
            for a in rep.quiver.arrows:
                if a.out == e:
                    prod = _kernels.batch_matmul(rep.maps[a.id][None], m[None], F.add, F.mul)[0]
                    if prod.any():
                        nxt.append((s, a.into, prod))
        paths = nxt
    return not any(m.any() for _, _, m in paths)


# -- exhaustive enumeration ---------------------------------------------------------


@dataclass
class Locus:
    quiver: Quiver
    q: int
    dims: dict
    layout: list  # (arrow, rows, cols, offset)
    codes: np.ndarray  # sorted int64
    points: np.ndarray  # (N, D) digits

    @property
    def size(self) -> int:
        return int(self.codes.shape[0])

    def arrays(self, points: np.ndarray | None = None) -> dict:
        pts = self.points if points is None else points
        return {
            a.id: pts[:, off : off + r * c].reshape(pts.shape[0], r, c) for a, r, c, off in self.layout
        }

    def rep(self, index: int) -> FqRep:
        arr = self.arrays(self.points[index : index + 1])
        return FqRep(self.quiver, self.q, dict(self.dims), {k: v[0].copy() for k, v in arr.items()})


def _layout(quiver: Quiver, dims: Mapping[Vertex, int]):
    layout, off = [], 0
    for a in quiver.arrows:
        r, c = dims.get(a.into, 0), dims.get(a.out, 0)
        layout.append((a, r, c, off))
        off += r * c
    return layout, off


def _encode(points: np.ndarray, q: int) -> np.ndarray:
    D = points.shape[1]
    weights = q ** np.arange(D - 1, -1, -1, dtype=np.int64)
    return points @ weights if D else np.zeros(points.shape[0], dtype=np.int64)


def enumerate_locus(
    quiver: Quiver,
    dims: Mapping[Vertex, int],
    q: int,
    *,
    mode: str = "one-nilpotent",
    cap: int = DEFAULT_POINT_CAP,
) -> Locus:
    """All points of ``E(alpha)(F_q)`` (``mode='all'``) or its 1-nilpotent/nilpotent locus."""
    dims = {v: int(dims.get(v, 0)) for v in quiver.vertices}
    F = get_field(q)
    layout, D = _layout(quiver, dims)
    total = q**D
    if total > cap:
        raise CapExceeded(f"|E(alpha)(F_{q})| = {q}^{D} exceeds the cap {cap}")
    chunk = 1 << 18
    kept_codes, kept_pts = [], []
    powers = q ** np.arange(D - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        pts = (codes[:, None] // powers[None, :]) % q if D else np.zeros((codes.size, 0), dtype=np.int64)
        mask = np.ones(codes.size, dtype=bool)
        arrays = {a.id: pts[:, off : off + r * c].reshape(pts.shape[0], r, c) for a, r, c, off in layout}
        if mode == "one-nilpotent":
            for v in quiver.vertices:
                loops = quiver.loops(v)
                if loops and dims[v]:
                    mask &= _words_vanish([arrays[a.id] for a in loops], dims[v], F)
        elif mode == "nilpotent":
            mask &= np.array(
                [is_nilpotent(FqRep(quiver, q, dims, {k: v[n] for k, v in arrays.items()})) for n in range(codes.size)],
                dtype=bool,
            )
        elif mode != "all":
            raise ValueError(f"unknown locus mode {mode!r}")
        kept_codes.append(codes[mask])
        kept_pts.append(pts[mask])
    codes = np.concatenate(kept_codes) if kept_codes else np.zeros(1, dtype=np.int64)
    pts = np.concatenate(kept_pts) if kept_pts else np.zeros((1, 0), dtype=np.int64)
    return Locus(quiver, q, dims, layout, codes, pts)


def _group_generators(n: int, F: GF) -> list[np.ndarray]:
    gens = []
    if F.q > 2:
        d = np.eye(n, dtype=np.int64)
        d[0, 0] = F.primitive
        gens.append(d)
    for i, j in itertools.permutations(range(n), 2):
        t = np.eye(n, dtype=np.int64)
        t[i, j] = 1
        gens.append(t)
    return gens


def _inverse(F: GF, g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    from .finite_field import rref

    aug = np.concatenate([g, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(F, aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix not invertible")
    return R[:, n:]


@dataclass
class OrbitData:
    representative: FqRep
    size: int
    code: int


def orbits(
    quiver: Quiver,
    dims: Mapping[Vertex, int],
    q: int,
    *,
    mode: str = "one-nilpotent",
    cap: int = DEFAULT_POINT_CAP,
    use_numba: bool | None = None,
    locus: Locus | None = None,
) -> list[OrbitData]:
    """Isomorphism classes in the locus, each with its orbit size."""
    locus = locus or enumerate_locus(quiver, dims, q, mode=mode, cap=cap)
    F = get_field(q)
    dims = locus.dims
    N = locus.size
    arrays = locus.arrays()
    images = []
    for v in quiver.vertices:
        n = dims[v]
        if n == 0:
            continue
        for g in _group_generators(n, F):
            ginv = _inverse(F, g)
            new_pts = locus.points.copy()
            touched = False
            for a, r, c, off in locus.layout:
                if r * c == 0 or (a.into != v and a.out != v):
                    continue
                L = g if a.into == v else np.eye(r, dtype=np.int64)
                R = ginv if a.out == v else np.eye(c, dtype=np.int64)
                img = _kernels.sandwich(L, arrays[a.id], R, F.add, F.mul, use_numba=use_numba)
                new_pts[:, off : off + r * c] = img.reshape(N, r * c)
                touched = True
            if not touched:
                continue
            img_codes = _encode(new_pts, q)
            idx = np.searchsorted(locus.codes, img_codes)
            idx = np.minimum(idx, N - 1)
            if not np.array_equal(locus.codes[idx], img_codes):
                raise RuntimeError("locus is not closed under the group action")
            images.append(idx)
    if images:
        labels = _kernels.orbit_labels(np.stack(images), use_numba=use_numba)
    else:
        labels = np.arange(N, dtype=np.int64)
    reps, counts = np.unique(labels, return_counts=True)
    return [OrbitData(locus.rep(int(r)), int(c), int(locus.codes[r])) for r, c in zip(reps, counts)]


# -- endomorphisms and indecomposability ------------------------------------------


def endomorphism_basis(rep: FqRep) -> list[dict]:
    """Basis of ``End(rep)`` as dicts ``vertex -> matrix``."""
    F = rep.field
    verts = [v for v in rep.quiver.vertices if rep.dims[v] > 0]
    offsets, nvars = {}, 0
    for v in verts:
        offsets[v] = nvars
        nvars += rep.dims[v] ** 2
    if nvars == 0:
        return []
    columns = []
    for v in verts:
        n = rep.dims[v]
        for i in range(n):
            for j in range(n):
                phi = {u: np.zeros((rep.dims[u], rep.dims[u]), dtype=np.int64) for u in verts}
                phi[v][i, j] = 1
                columns.append(_intertwining_defect(rep, phi))
    M = np.array(columns, dtype=np.int64).T if columns and columns[0].size else np.zeros((0, nvars), dtype=np.int64)
    basis = []
    for vec in nullspace(F, M):
        phi = {}
        for v in verts:
            n = rep.dims[v]
            phi[v] = vec[offsets[v] : offsets[v] + n * n].reshape(n, n)
        basis.append(phi)
    return basis


def _intertwining_defect(rep: FqRep, phi: dict) -> np.ndarray:
    from .finite_field import matmul

    F = rep.field
    parts = []
    for a in rep.quiver.arrows:
        x = rep.maps[a.id]
        if x.size == 0:
            continue
        lhs = matmul(F, phi[a.into], x)
        rhs = matmul(F, x, phi[a.out])
        parts.append(F.sub[lhs, rhs].ravel())
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _block_diag(rep: FqRep, phi: dict) -> np.ndarray:
    N = rep.total_dim
    out = np.zeros((N, N), dtype=np.int64)
    off = 0
    for v in rep.quiver.vertices:
        n = rep.dims[v]
        if n:
            out[off : off + n, off : off + n] = phi[v]
            off += n
    return out


def _scalar_plus_nilpotent(F: GF, mats: np.ndarray) -> np.ndarray:
    """Mask of batched square matrices of the form ``c*1 + nilpotent``."""
    B, N, _ = mats.shape
    ok = np.zeros(B, dtype=bool)
    eye = np.eye(N, dtype=np.int64)
    for lam in range(F.q):
        shifted = F.sub[mats, (F.mul[lam, eye])[None, :, :]]
        power = shifted
        steps = 1
        while steps < N:
            power = _kernels.batch_matmul(power, power, F.add, F.mul)
            steps *= 2
        ok |= ~power.reshape(B, -1).any(axis=1)
    return ok


def is_absolutely_indecomposable(rep: FqRep, cap: int = DEFAULT_END_CAP) -> bool:
    """True iff ``End(rep)`` is local with residue field ``F_q``.

    Equivalently every endomorphism is a scalar plus a nilpotent.  This rules
    out nontrivial idempotents over every extension of ``F_q`` at once.
    """
    if rep.total_dim == 0:
        return False
    F = rep.field
    basis = [_block_diag(rep, b) for b in endomorphism_basis(rep)]
    d = len(basis)
    if d == 1:
        return True
    stack = np.stack(basis)
    if not _scalar_plus_nilpotent(F, stack).all():
        return False
    if F.q**d > cap:
        raise CapExceeded(f"|End| = {F.q}^{d} exceeds the cap {cap}")
    coeffs = np.array(list(itertools.product(range(F.q), repeat=d)), dtype=np.int64)
    chunk = 1 << 14
    for s in range(0, coeffs.shape[0], chunk):
        cs = coeffs[s : s + chunk]
        mats = np.zeros((cs.shape[0],) + basis[0].shape, dtype=np.int64)
        for k in range(d):
            mats = F.add[mats, F.mul[cs[:, k][:, None, None], stack[k][None, :, :]]]
        if not _scalar_plus_nilpotent(F, mats).all():
            return False
    return True


def is_indecomposable(rep: FqRep, cap: int = DEFAULT_END_CAP) -> bool:
    """No idempotent in ``End(rep)`` other than 0 and 1."""
    if rep.total_dim == 0:
        return False
    F = rep.field
    basis = [_block_diag(rep, b) for b in endomorphism_basis(rep)]
    d = len(basis)
    if F.q**d > cap:
        raise CapExceeded(f"|End| = {F.q}^{d} exceeds the cap {cap}")
    stack = np.stack(basis)
    eye = np.eye(rep.total_dim, dtype=np.int64)
    for cs in itertools.product(range(F.q), repeat=d):
        m = np.zeros_like(eye)
        for k, c in enumerate(cs):
            if c:
                m = F.add[m, F.mul[c, stack[k]]]
        sq = _kernels.batch_matmul(m[None], m[None], F.add, F.mul)[0]
        if np.array_equal(sq, m) and m.any() and not np.array_equal(m, eye):
            return False
    return True


# -- counting and Kac polynomials -------------------------------------------------


def count_absolutely_indecomposable(
    quiver: Quiver, dims: Mapping[Vertex, int], q: int, *, mode: str = "one-nilpotent", cap: int = DEFAULT_POINT_CAP
) -> int:
    return sum(1 for o in orbits(quiver, dims, q, mode=mode, cap=cap) if is_absolutely_indecomposable(o.representative))


def kac_degree_bound(quiver: Quiver, dims: Mapping[Vertex, int]) -> int:
    d = {v: dims.get(v, 0) for v in quiver.vertices}
    return max(1 - quiver.euler_form(d, d), 0)


def kac_polynomial_1nil(
    quiver: Quiver,
    dims: Mapping[Vertex, int],
    sample_qs: Sequence[int] = DEFAULT_SAMPLE_FIELDS,
    *,
    mode: str = "one-nilpotent",
    cap: int = DEFAULT_POINT_CAP,
) -> CountingPolynomial:
    samples = [(q, count_absolutely_indecomposable(quiver, dims, q, mode=mode, cap=cap)) for q in sample_qs]
    return fit_counting_polynomial(samples, kac_degree_bound(quiver, dims))


@dataclass
class CorrespondenceReport:
    rows: list  # (alpha, dim g_alpha, A(0), polynomial)

    @property
    def all_equal(self) -> bool:
        return all(m == a0 for _, m, a0, _ in self.rows)

    def lie_roots(self) -> set:
        return {a for a, m, _, _ in self.rows if m > 0}

    def quiver_roots(self) -> set:
        return {a for a, _, a0, _ in self.rows if a0 > 0}

    @property
    def roots_match(self) -> bool:
        return self.lie_roots() == self.quiver_roots()


def check_root_correspondence(
    quiver: Quiver,
    box: DegreeBox,
    sample_qs: Sequence[int] = DEFAULT_SAMPLE_FIELDS,
    cap: int = DEFAULT_POINT_CAP,
) -> CorrespondenceReport:
    engine = MultiplicityEngine(cartan_of_quiver(quiver), (), box)
    rows = []
    for alpha in box.points():
        if alpha.is_zero():
            continue
        poly = kac_polynomial_1nil(quiver, dict(alpha.items), sample_qs, cap=cap)
        rows.append((alpha, engine.multiplicity(alpha), poly(0), poly))
    rows.sort(key=lambda r: (r[0].height(), [(vertex_key(v), k) for v, k in r[0].items]))
    return CorrespondenceReport(rows)
