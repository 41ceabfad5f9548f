"""Betti numbers, projective dimension and depth of S/I for monomial ideals.

Two routes to the multigraded Betti numbers live here.

* The lcm-lattice route: b_{i,m}(S/I) is the reduced homology in degree
  i-2 of the order complex of the open interval (1, m) of the lcm lattice.
  This is exact but the order complexes grow quickly, so it is meant for
  small ideals.
* The upper Koszul route: b_{i,m}(S/I) is the reduced homology in degree
  i-2 of K^m(I) = {F subset of supp(m) : m / x_F in I}.  Every K^m lives on
  at most n vertices, most of them are cones, and the non-cones repeat
  heavily, so a vectorised sweep over the exponent box plus a homology
  cache handles powers with thousands of generators.  depth() uses it.

A third, brute-force route (Koszul strands over the whole exponent box) and
the socle search for depth zero are kept as independent checks.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError, ResourceLimitError
from .ideals import LcmLattice, Monomial, MonomialIdeal, divides, format_monomial, lcm_lattice
from .linalg import QQ, ExactMatrix, Field, sparse_rank

BOX_CAP = 40_000_000
FACE_CAP = 200_000
KOSZUL_MAX_VARS = 12


class SimplicialComplex:
    """Finite simplicial complex on labelled vertices.

    Faces are sorted tuples of vertex indices into ``vertices``; the empty
    face is implicit (complexes here are never void).
    """

    def __init__(self, vertices: Sequence, faces: Iterable[Sequence[int]], *, close: bool = False):
        self.vertices = tuple(vertices)
        fs = {tuple(sorted(f)) for f in faces}
        fs.discard(())
        if close:
            closed = set()
            for f in fs:
                for r in range(1, len(f) + 1):
                    closed.update(itertools.combinations(f, r))
            fs = closed
        else:
            for f in fs:
                if len(f) > 1:
                    for j in range(len(f)):
                        sub = f[:j] + f[j + 1:]
                        if sub not in fs:
                            raise ValueError(f"face {f} present but its facet {sub} missing")
        for f in fs:
            if any(not 0 <= v < len(self.vertices) for v in f):
                raise ValueError(f"face {f} uses an unknown vertex")
        self.faces = frozenset(fs)

    @classmethod
    def from_facets(cls, vertices, facets) -> "SimplicialComplex":
        return cls(vertices, facets, close=True)

    @classmethod
    def from_mask(cls, n: int, faces: Iterable[int]) -> "SimplicialComplex":
        """Complex on 0..n-1 from faces given as bitmasks."""
        return cls(range(n), [tuple(j for j in range(n) if f >> j & 1) for f in faces])

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    def faces_of_dim(self, d: int) -> list[tuple[int, ...]]:
        if d == -1:
            return [()]
        return sorted(f for f in self.faces if len(f) == d + 1)

    def f_vector(self) -> list[int]:
        """Face counts for dimensions -1..dim."""
        return [len(self.faces_of_dim(d)) for d in range(-1, self.dim + 1)]

    def reduced_euler_characteristic(self) -> int:
        return sum((-1) ** d * c for d, c in zip(range(-1, self.dim + 1), self.f_vector()))

    def boundary_columns(self, d: int) -> list[dict[int, int]]:
        """Sparse columns of the boundary map from d-faces to (d-1)-faces."""
        lower = {f: i for i, f in enumerate(self.faces_of_dim(d - 1))}
        cols = []
        for f in self.faces_of_dim(d):
            col = {}
            for j in range(len(f)):
                col[lower[f[:j] + f[j + 1:]]] = -1 if j % 2 else 1
            cols.append(col)
        return cols

    def boundary_matrix(self, d: int) -> ExactMatrix:
        rows = len(self.faces_of_dim(d - 1))
        cols = self.boundary_columns(d)
        dense = [[0] * len(cols) for _ in range(rows)]
        for c, col in enumerate(cols):
            for r, x in col.items():
                dense[r][c] = x
        return ExactMatrix(rows, len(cols), tuple(tuple(r) for r in dense))

    def is_cone(self) -> bool:
        fs = self.faces | {()}
        for v in range(len(self.vertices)):
            if all(f in fs or v in f for f in fs) and all(
                tuple(sorted(f + (v,))) in fs for f in fs if v not in f
            ):
                return True
        return False

    def __len__(self) -> int:
        return len(self.faces)

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, {len(self.faces)} faces)"


def boundary_squares_vanish(K: SimplicialComplex) -> bool:
    """Check d_{i-1} o d_i = 0 for every consecutive pair of boundary maps."""
    for d in range(1, K.dim + 1):
        prod = K.boundary_matrix(d - 1) @ K.boundary_matrix(d)
        if not prod.is_zero():
            return False
    return True


def reduced_homology_dims(K: SimplicialComplex, field: Field = QQ) -> list[int]:
    """dim H~_i(K) for i = -1..dim K (position 0 holds i = -1)."""
    top = K.dim
    ranks = {}
    for d in range(0, top + 1):
        ranks[d] = sparse_rank(K.boundary_columns(d), field)
    out = []
    for d in range(-1, top + 1):
        f = len(K.faces_of_dim(d))
        out.append(f - ranks.get(d, 0) - ranks.get(d + 1, 0))
    return out


@lru_cache(maxsize=200_000)
def _mask_homology(n: int, packed: bytes, characteristic: int) -> tuple[int, ...]:
    bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8), bitorder="little")
    faces = [f for f in range(1, 1 << n) if bits[f]]
    K = SimplicialComplex.from_mask(n, faces)
    return tuple(reduced_homology_dims(K, Field(characteristic)))


# ---------------------------------------------------------------------------
# lcm-lattice route

def open_interval_order_complex(L: LcmLattice, m: Monomial, face_cap: int = FACE_CAP) -> SimplicialComplex:
    """Order complex of the open interval (1, m) of the lcm lattice."""
    if m not in L:
        raise PreconditionError(f"{format_monomial(m)} is not in the lcm lattice")
    verts = sorted(L.below(m), key=lambda e: (sum(e), e))
    up = [[j for j in range(i + 1, len(verts)) if divides(verts[i], verts[j])] for i in range(len(verts))]
    faces = []
    stack = [(i,) for i in range(len(verts))]
    while stack:
        chain = stack.pop()
        faces.append(chain)
        if len(faces) > face_cap:
            raise ResourceLimitError("order complex faces", face_cap)
        stack.extend(chain + (j,) for j in up[chain[-1]])
    return SimplicialComplex(verts, faces)


@dataclass
class BettiTable:
    """Multigraded Betti numbers of S/I, keyed by (homological degree, multidegree)."""

    n: int
    field: Field
    entries: dict[tuple[int, Monomial], int] = field(default_factory=dict)

    def totals(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (i, _), b in self.entries.items():
            out[i] = out.get(i, 0) + b
        return dict(sorted(out.items()))

    def total(self, i: int) -> int:
        return self.totals().get(i, 0)

    def __getitem__(self, key: tuple[int, Monomial]) -> int:
        return self.entries.get(key, 0)

    @property
    def pd(self) -> int:
        return max(i for (i, _), b in self.entries.items() if b)

    def nonzero(self) -> dict[tuple[int, Monomial], int]:
        return {k: v for k, v in sorted(self.entries.items()) if v}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["i", "multidegree", "b"])
        for (i, m), b in sorted(self.nonzero().items(), key=lambda kv: (kv[0][0], sum(kv[0][1]), kv[0][1])):
            w.writerow([i, format_monomial(m), b])
        return buf.getvalue()

    def __eq__(self, other) -> bool:
        return isinstance(other, BettiTable) and self.n == other.n and self.nonzero() == other.nonzero()


def _check_proper(ideal: MonomialIdeal) -> None:
    if not ideal.gens:
        raise PreconditionError("zero ideal is not supported")
    if ideal.is_unit_ideal():
        raise PreconditionError("unit ideal is not supported")


def betti_table(ideal: MonomialIdeal, field: Field = QQ, method: str = "lattice",
                lattice_cap: int | None = None) -> BettiTable:
    """Multigraded Betti numbers of S/I.

    ``method="lattice"`` uses order complexes of lcm-lattice intervals;
    ``method="koszul"`` uses upper Koszul complexes from the box sweep.
    """
    _check_proper(ideal)
    if method == "koszul":
        return _koszul_betti_table(ideal, field)
    if method != "lattice":
        raise ValueError(f"unknown method {method!r}")
    L = lcm_lattice(ideal) if lattice_cap is None else lcm_lattice(ideal, cap=lattice_cap)
    table = BettiTable(ideal.n, field, {(0, (0,) * ideal.n): 1})
    for m in L.elements:
        K = open_interval_order_complex(L, m)
        for idx, h in enumerate(reduced_homology_dims(K, field)):
            if h:
                table.entries[(idx + 1, m)] = h
    return table


# ---------------------------------------------------------------------------
# upper Koszul route

@dataclass
class _Box:
    shape: tuple[int, ...]
    strides: np.ndarray
    counts: np.ndarray  # number of generators dividing each box point

    @property
    def in_ideal(self) -> np.ndarray:
        return self.counts > 0


def _divisor_counts(ideal: MonomialIdeal, pad: int = 0, box_cap: int = BOX_CAP) -> _Box:
    gens = ideal.array()
    shape = tuple(int(x) + 1 + pad for x in gens.max(axis=0))
    size = int(np.prod(shape, dtype=object))
    if size > box_cap:
        raise ResourceLimitError("exponent box size", box_cap, size)
    counts = np.zeros(shape, dtype=np.int32)
    np.add.at(counts, tuple(gens.T), 1)
    for ax in range(ideal.n):
        np.cumsum(counts, axis=ax, out=counts)
    strides = np.array([int(np.prod(shape[j + 1:])) for j in range(ideal.n)], dtype=np.int64)
    return _Box(shape, strides, counts)


def lattice_points(ideal: MonomialIdeal, box_cap: int = BOX_CAP) -> np.ndarray:
    """Non-unit lcm-lattice elements as rows of an int array, via the box.

    m is an lcm of generators iff for every j in supp(m) some generator
    dividing m has the full exponent m_j, i.e. more generators divide m
    than divide m / x_j.
    """
    box = _divisor_counts(ideal, box_cap=box_cap)
    c = box.counts
    keep = c > 0
    for j in range(ideal.n):
        lower = np.zeros_like(c)
        src = [slice(None)] * ideal.n
        dst = [slice(None)] * ideal.n
        src[j] = slice(0, -1)
        dst[j] = slice(1, None)
        lower[tuple(dst)] = c[tuple(src)]
        idx = np.zeros(c.shape, dtype=bool)
        idx[tuple(dst)] = True
        keep &= ~idx | (c > lower)
    return np.argwhere(keep)


def _upper_koszul_masks(ideal: MonomialIdeal, box_cap: int, chunk: int = 1 << 16):
    """Yield (points, face-indicator rows) for non-cone K^m, chunk by chunk."""
    n = ideal.n
    if n > KOSZUL_MAX_VARS:
        raise ResourceLimitError("variables for the Koszul sweep", KOSZUL_MAX_VARS, n)
    box = _divisor_counts(ideal, box_cap=box_cap)
    flat = box.counts.ravel() > 0
    pts_all = lattice_points(ideal, box_cap=box_cap)
    N = 1 << n
    low = [(F & -F).bit_length() - 1 for F in range(N)]
    for start in range(0, len(pts_all), chunk):
        pts = pts_all[start:start + chunk]
        base = pts @ box.strides
        L = len(pts)
        valid = np.empty((N, L), dtype=bool)
        offset = np.zeros(N, dtype=np.int64)
        faces = np.empty((N, L), dtype=bool)
        valid[0] = True
        faces[0] = True
        for F in range(1, N):
            j = low[F]
            prev = F & (F - 1)
            offset[F] = offset[prev] + box.strides[j]
            valid[F] = valid[prev] & (pts[:, j] > 0)
            faces[F] = valid[F] & flat[np.where(valid[F], base - offset[F], 0)]
        cone = np.zeros(L, dtype=bool)
        for j in range(n):
            bit = 1 << j
            without = np.array([F for F in range(N) if not F & bit])
            cone |= (~faces[without] | faces[without | bit]).all(axis=0)
        keep = ~cone
        if keep.any():
            yield pts[keep], faces[:, keep]


def _grouped_complexes(ideal: MonomialIdeal, box_cap: int):
    """Map packed face masks to the multidegrees m whose K^m has that shape."""
    groups: dict[bytes, list] = {}
    for pts, faces in _upper_koszul_masks(ideal, box_cap):
        packed = np.packbits(faces, axis=0, bitorder="little").T
        packed = np.ascontiguousarray(packed)
        for row, p in zip(packed, pts):
            groups.setdefault(row.tobytes(), []).append(p)
    return groups


def _koszul_betti_table(ideal: MonomialIdeal, field: Field, box_cap: int = BOX_CAP) -> BettiTable:
    table = BettiTable(ideal.n, field, {(0, (0,) * ideal.n): 1})
    for packed, pts in _grouped_complexes(ideal, box_cap).items():
        dims = _mask_homology(ideal.n, packed, field.characteristic)
        for idx, h in enumerate(dims):
            if h:
                for p in pts:
                    table.entries[(idx + 1, tuple(int(x) for x in p))] = h
    return table


def _max_face_size(packed: bytes, n: int) -> int:
    bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8), bitorder="little")
    return max(bin(f).count("1") for f in range(1 << n) if bits[f])


def projective_dimension(ideal: MonomialIdeal, field: Field = QQ, box_cap: int = BOX_CAP) -> int:
    """pd(S/I), stopping once no remaining complex can beat the current best."""
    _check_proper(ideal)
    groups = _grouped_complexes(ideal, box_cap)
    ordered = sorted(groups, key=lambda p: -_max_face_size(p, ideal.n))
    best = 1
    for packed in ordered:
        # homology sits in dimensions <= max face size - 1, giving i <= size + 1
        if best >= _max_face_size(packed, ideal.n) + 1:
            break
        dims = _mask_homology(ideal.n, packed, field.characteristic)
        for idx, h in enumerate(dims):
            if h:
                best = max(best, idx + 1)
    return best


@dataclass(frozen=True)
class DepthValue:
    depth: int
    pd: int
    n: int
    field: Field

    def __int__(self) -> int:
        return self.depth


def depth(ideal: MonomialIdeal, field: Field = QQ, box_cap: int = BOX_CAP) -> DepthValue:
    """depth S/I = n - pd(S/I) over the given field."""
    pd = projective_dimension(ideal, field, box_cap=box_cap)
    return DepthValue(ideal.n - pd, pd, ideal.n, field)


# ---------------------------------------------------------------------------
# independent checks

def koszul_strand_betti_table(ideal: MonomialIdeal, field: Field = QQ, box_cap: int = 200_000) -> BettiTable:
    """Brute-force Tor_i(S/I, K)_a over every a in the exponent box.

    In degree a the Koszul complex of S/I has a basis element for each F
    in supp(a) with x^(a - F) not in I; the differential drops one index
    at a time.  Betti numbers vanish outside the box [0, lcm of gens].
    """
    _check_proper(ideal)
    n = ideal.n
    top = ideal.max_exponents()
    size = 1
    for t in top:
        size *= t + 1
    if size > box_cap:
        raise ResourceLimitError("Koszul strand box", box_cap, size)
    table = BettiTable(n, field, {})
    for a in itertools.product(*(range(t + 1) for t in top)):
        supp = [j for j in range(n) if a[j]]
        basis: dict[int, list[tuple[int, ...]]] = {}
        for r in range(len(supp) + 1):
            for F in itertools.combinations(supp, r):
                b = list(a)
                for j in F:
                    b[j] -= 1
                if tuple(b) not in ideal:
                    basis.setdefault(r, []).append(F)
        if not basis:
            continue
        index = {r: {F: i for i, F in enumerate(fs)} for r, fs in basis.items()}
        ranks = {}
        for r, fs in basis.items():
            if r == 0:
                continue
            cols = []
            for F in fs:
                col = {}
                for pos in range(len(F)):
                    sub = F[:pos] + F[pos + 1:]
                    i = index.get(r - 1, {}).get(sub)
                    if i is not None:
                        col[i] = -1 if pos % 2 else 1
                cols.append(col)
            ranks[r] = sparse_rank(cols, field)
        for r, fs in basis.items():
            h = len(fs) - ranks.get(r, 0) - ranks.get(r + 1, 0)
            if h:
                table.entries[(r, tuple(a))] = h
    return table


def socle_witness(ideal: MonomialIdeal, box_cap: int = BOX_CAP) -> Monomial | None:
    """A monomial w not in I with x_i w in I for every variable of supp(I).

    w is searched in the box w_j <= max exponent of x_j, which contains every
    witness: if w_j were at least that maximum, a generator dividing x_j w
    would already divide w.
    """
    _check_proper(ideal)
    supp = sorted(ideal.support())
    box = _divisor_counts(ideal, pad=1, box_cap=box_cap)
    inI = box.in_ideal
    core = tuple(slice(0, s - 1) if (j + 1) in supp else slice(0, 1) for j, s in enumerate(box.shape))
    ok = ~inI[core]
    for j in supp:
        idx = list(core)
        sl = core[j - 1]
        idx[j - 1] = slice(sl.start + 1, sl.stop + 1)
        ok &= inI[tuple(idx)]
    hits = np.argwhere(ok)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0])


def socle_depth_zero_oracle(ideal: MonomialIdeal, box_cap: int = BOX_CAP) -> bool:
    """True iff the maximal ideal of the support variables is associated to I."""
    return socle_witness(ideal, box_cap=box_cap) is not None
