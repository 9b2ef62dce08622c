"""Surjective median-preserving maps between finite median algebras.

An Epimorphism stores, for each source carrier position, the image as a
target point int.  Enumeration comes in two flavors: plain backtracking
over carrier positions for small sources, and search over injective
oriented wall assignments for large sources with small targets (an
epimorphism is exactly a consistent way of pulling the target's walls
back to source walls, so the second search loses nothing).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import (
    BoundExceeded,
    InternalInvariantViolation,
    NotMedianClosed,
    NotMedianPreserving,
    NotSurjective,
    ResourceLimit,
    TypeMismatch,
)
from .median_core import MedianAlgebra, canonicalize, majority, point_to_str

CHECK_MAX_POINTS = 64
EPI_ENUM_MAX_POINTS = 16
ISO_MAX_POINTS = 16

_GENERIC_SEARCH_MAX = 12
_WALL_ASSIGNMENT_CAP = 10_000_000


@dataclass(frozen=True)
class Epimorphism:
    """A map between algebras, intended to be onto and median-preserving.

    ``map[k]`` is the image (a target point int) of the k-th carrier point
    of the source.  Construction checks only shape and membership; run
    check_epimorphism for the real contract.
    """

    source: MedianAlgebra
    target: MedianAlgebra
    map: tuple[int, ...]

    def __post_init__(self):
        if len(self.map) != self.source.size:
            raise TypeMismatch(
                f"map has {len(self.map)} entries for {self.source.size} source points"
            )
        tidx = self.target._index
        for v in self.map:
            if v not in tidx:
                raise TypeMismatch(
                    f"image {v!r} is not a point of the target algebra"
                )

    @cached_property
    def position_map(self) -> tuple[int, ...]:
        tidx = self.target._index
        return tuple(tidx[v] for v in self.map)

    def __call__(self, p: int | str) -> int:
        return self.map[self.source.position(p)]

    def map_strs(self) -> list[str]:
        return [point_to_str(v, self.target.dim) for v in self.map]

    def __repr__(self):
        return (
            f"Epimorphism({self.source.size}pt -> {self.target.size}pt, "
            f"[{','.join(self.map_strs())}])"
        )


def identity(algebra: MedianAlgebra) -> Epimorphism:
    return Epimorphism(algebra, algebra, algebra.carrier)


def compose(f: Epimorphism, g: Epimorphism) -> Epimorphism:
    """f after g: feeds each g-image through f."""
    if g.target != f.source:
        raise TypeMismatch("compose(f, g) needs g.target == f.source")
    sidx = f.source._index
    return Epimorphism(g.source, f.target, tuple(f.map[sidx[v]] for v in g.map))


def _preservation_witness_pure(epi: Epimorphism):
    car = epi.source.carrier
    tcar_idx = epi.target._index
    fmap = epi.map
    n = len(car)
    for i in range(n):
        for j in range(i + 1, n):
            ab = car[i] & car[j]
            a_or = car[i] | car[j]
            fij_and = fmap[i] & fmap[j]
            fij_or = fmap[i] | fmap[j]
            for k in range(j + 1, n):
                m = ab | (a_or & car[k])
                want = fij_and | (fij_or & fmap[k])
                got = fmap[epi.source._index[m]]
                if got != want:
                    return car[i], car[j], car[k]
    return None


def _preservation_ok_numpy(epi: Epimorphism) -> bool:
    src = np.asarray(epi.source.carrier, dtype=np.uint64)
    img = np.asarray(epi.map, dtype=np.uint64)
    rows, cols = src[:, None], src[None, :]
    irows, icols = img[:, None], img[None, :]
    base = rows & cols
    ibase = irows & icols
    for idx in range(len(src)):
        a, fa = src[idx], img[idx]
        meds = base | (a & rows) | (a & cols)
        pos = np.searchsorted(src, meds)
        if not (src[pos] == meds).all():
            raise NotMedianClosed("source algebra is not median-closed")
        want = ibase | (fa & irows) | (fa & icols)
        if not (img[pos] == want).all():
            return False
    return True


def check_epimorphism(epi: Epimorphism, *, max_size: int | None = CHECK_MAX_POINTS) -> Epimorphism:
    """Verify surjectivity and median preservation, returning the map.

    Raises NotSurjective or NotMedianPreserving (with the first violating
    source triple in ascending position order).  Sources above max_size
    are refused; pass max_size=None to check anyway, which switches to a
    vectorized scan for big carriers.
    """
    n = epi.source.size
    if max_size is not None and n > max_size:
        raise BoundExceeded(
            f"checking a {n}-point source exceeds max_size={max_size}"
        )
    missing = set(epi.target.carrier) - set(epi.map)
    if missing:
        shown = point_to_str(min(missing), epi.target.dim)
        raise NotSurjective(f"target point {shown} has no preimage")
    if n >= 32 and epi.source.dim <= 63 and epi.target.dim <= 63:
        if _preservation_ok_numpy(epi):
            return epi
    witness = _preservation_witness_pure(epi)
    if witness is not None:
        strs = [point_to_str(p, epi.source.dim) for p in witness]
        raise NotMedianPreserving(
            f"majority of ({strs[0]}, {strs[1]}, {strs[2]}) is not preserved",
            witness=witness,
        )
    return epi


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=8192)
def _triples_by_trigger(algebra: MedianAlgebra):
    """Majority constraints grouped by their last-assigned position."""
    n = algebra.size
    table = algebra.position_median_table
    out = [[] for _ in range(n)]
    for i in range(n):
        ti = table[i]
        for j in range(i + 1, n):
            tij = ti[j]
            for k in range(j + 1, n):
                m = tij[k]
                out[max(k, m)].append((i, j, k, m))
    return tuple(tuple(t) for t in out)


def _search_position_maps(source, target, *, injective, limit=None):
    """Backtracking over source positions; yields position-map tuples in
    lexicographic order, which coincides with point-map order because the
    target carrier is sorted."""
    n, m = source.size, target.size
    triples = _triples_by_trigger(source)
    tmed = target.position_median_table
    assign = [-1] * n
    hit = [0] * m
    results = []
    if injective:
        # bijections preserve interval sizes, so candidates must match the
        # sorted row profile and stay pairwise consistent with the prefix
        srows = source.interval_size_matrix
        trows = target.interval_size_matrix
        tprof = [tuple(sorted(r)) for r in trows]
        cand = [
            [v for v in range(m) if tprof[v] == prof]
            for prof in (tuple(sorted(r)) for r in srows)
        ]
    else:
        cand = [range(m)] * n
        srows = trows = None

    def place(pos, missing):
        if limit is not None and len(results) >= limit:
            return
        if pos == n:
            results.append(tuple(assign))
            return
        srow = srows[pos] if injective else None
        for v in cand[pos]:
            if injective:
                if hit[v]:
                    continue
                trow = trows[v]
                if any(
                    trow[assign[q]] != srow[q] for q in range(pos)
                ):
                    continue
            new_missing = missing - (0 if hit[v] else 1)
            if new_missing > n - pos - 1:
                continue
            assign[pos] = v
            ok = True
            for i, j, k, mm in triples[pos]:
                if assign[mm] != tmed[assign[i]][assign[j]][assign[k]]:
                    ok = False
                    break
            if ok:
                hit[v] += 1
                place(pos + 1, new_missing)
                hit[v] -= 1
            assign[pos] = -1

    place(0, m)
    return results


def _epis_via_walls(source, target):
    """Epimorphisms as injective oriented wall assignments.

    Each target wall is matched to an oriented source wall; the candidate
    map sends a point to the target point with the same side signature.
    Well-definedness is the only condition to check per point, since walls
    are coordinates and majority acts sidewise; surjectivity is checked at
    the end.  Distinct assignments always give distinct maps.
    """
    swalls = source.wall_masks
    twalls = target.wall_masks
    wn = len(twalls)
    n = source.size
    space = (
        2**wn * int(np.prod([len(swalls) - i for i in range(wn)], dtype=object))
        if wn
        else 1
    )
    if space > _WALL_ASSIGNMENT_CAP:
        raise ResourceLimit(
            f"{space} oriented wall assignments exceed the search cap"
        )
    sig_to_target = {}
    for pos in range(target.size):
        sig = 0
        for j, (_, t1) in enumerate(twalls):
            if (t1 >> pos) & 1:
                sig |= 1 << (wn - 1 - j)
        sig_to_target[sig] = pos
    results = []
    for combo in itertools.permutations(range(len(swalls)), wn):
        for orient in range(1 << wn):
            side1s = []
            for j in range(wn):
                s0, s1 = swalls[combo[j]]
                if (orient >> (wn - 1 - j)) & 1:
                    side1s.append(s0)
                else:
                    side1s.append(s1)
            assign = []
            for pos in range(n):
                sig = 0
                for j in range(wn):
                    if (side1s[j] >> pos) & 1:
                        sig |= 1 << (wn - 1 - j)
                t = sig_to_target.get(sig)
                if t is None:
                    break
                assign.append(t)
            else:
                if len(set(assign)) == target.size:
                    results.append(tuple(assign))
    results.sort(key=lambda a: tuple(target.carrier[v] for v in a))
    return results


def enumerate_epis(
    source: MedianAlgebra,
    target: MedianAlgebra,
    *,
    max_size: int | None = EPI_ENUM_MAX_POINTS,
) -> list[Epimorphism]:
    """All epimorphisms from source onto target, sorted by image tuple.

    Sources above max_size are refused unless max_size=None, in which case
    large sources are handled by the wall-assignment search (practical
    whenever the target stays small).
    """
    if max_size is not None and source.size > max_size:
        raise BoundExceeded(
            f"enumerating maps from a {source.size}-point source exceeds "
            f"max_size={max_size}"
        )
    if target.size > source.size:
        return []
    if source.size <= _GENERIC_SEARCH_MAX:
        assigns = _search_position_maps(source, target, injective=False)
    else:
        assigns = _epis_via_walls(source, target)
    tcar = target.carrier
    return [
        Epimorphism(source, target, tuple(tcar[v] for v in a)) for a in assigns
    ]


def find_isomorphism(
    algebra_a: MedianAlgebra,
    algebra_b: MedianAlgebra,
    *,
    max_size: int | None = ISO_MAX_POINTS,
) -> Epimorphism | None:
    """An isomorphism between the algebras, or None when they differ.

    Equal canonical forms give the witness immediately.  Distinct forms do
    not settle the question (the canonical labeling is cheap rather than
    complete), so the slow path is a backtracking search for a bijective
    epimorphism; that search refuses carriers above max_size.
    """
    if algebra_a.size != algebra_b.size:
        return None
    wa = sorted(min(s0.bit_count(), s1.bit_count()) for s0, s1 in algebra_a.wall_masks)
    wb = sorted(min(s0.bit_count(), s1.bit_count()) for s0, s1 in algebra_b.wall_masks)
    if wa != wb:
        return None
    if algebra_a.canonical and algebra_b.canonical:
        if (algebra_a.dim, algebra_a.carrier) == (algebra_b.dim, algebra_b.carrier):
            return Epimorphism(algebra_a, algebra_b, algebra_b.carrier)
    else:
        ca, pa = canonicalize(algebra_a)
        cb, pb = canonicalize(algebra_b)
        if (ca.dim, ca.carrier) == (cb.dim, cb.carrier):
            inv = [0] * algebra_b.size
            for k, v in enumerate(pb):
                inv[v] = k
            mapping = tuple(
                algebra_b.carrier[inv[pa[k]]] for k in range(algebra_a.size)
            )
            return Epimorphism(algebra_a, algebra_b, mapping)
    if sorted(tuple(sorted(r)) for r in algebra_a.interval_size_matrix) != sorted(
        tuple(sorted(r)) for r in algebra_b.interval_size_matrix
    ):
        return None
    if max_size is not None and algebra_a.size > max_size:
        raise BoundExceeded(
            f"isomorphism search on {algebra_a.size} points exceeds max_size={max_size}"
        )
    assigns = _search_position_maps(algebra_a, algebra_b, injective=True, limit=1)
    if not assigns:
        return None
    tcar = algebra_b.carrier
    return Epimorphism(algebra_a, algebra_b, tuple(tcar[v] for v in assigns[0]))


@lru_cache(maxsize=256)
def automorphisms(algebra: MedianAlgebra) -> tuple[Epimorphism, ...]:
    """All self-isomorphisms, sorted by image tuple."""
    assigns = _search_position_maps(algebra, algebra, injective=True)
    car = algebra.carrier
    return tuple(
        Epimorphism(algebra, algebra, tuple(car[v] for v in a)) for a in assigns
    )


def factor_epimorphism(f: Epimorphism, g: Epimorphism) -> Epimorphism | None:
    """The map h with h(f(x)) = g(x) for all x, or None if there is none.

    h exists exactly when f identifies only points that g also identifies.
    For genuine epimorphisms the induced map is automatically surjective
    and median-preserving; both are still verified so that malformed
    inputs answer None instead of smuggling a bad map through.
    """
    if f.source != g.source:
        raise TypeMismatch("both maps must share their source")
    hmap: list[int | None] = [None] * f.target.size
    tidx = f.target._index
    for pos in range(f.source.size):
        b = tidx[f.map[pos]]
        if hmap[b] is None:
            hmap[b] = g.map[pos]
        elif hmap[b] != g.map[pos]:
            return None
    if any(v is None for v in hmap):
        raise NotSurjective("f does not reach every point of its target")
    h = Epimorphism(f.target, g.target, tuple(hmap))
    try:
        check_epimorphism(h, max_size=None)
    except (NotSurjective, NotMedianPreserving):
        return None
    return h


# ---------------------------------------------------------------------------
# pullbacks


@dataclass(frozen=True)
class PullbackData:
    """A pullback square: apex with its two projections.

    ``pairs[k]`` records which (left point, right point) combination the
    k-th apex point encodes; ``pair`` builds the mediating map of any
    commuting cone from that table.
    """

    apex: MedianAlgebra
    left: Epimorphism
    right: Epimorphism
    pairs: tuple[tuple[int, int], ...]

    def pair(self, u: Epimorphism, v: Epimorphism) -> Epimorphism:
        """Mediating map of the cone (u, v) into the apex.

        The cone must commute with the pulled-back pair; uniqueness holds
        because the projections are jointly injective.  The result need
        not be onto for an arbitrary cone.
        """
        if u.source != v.source:
            raise TypeMismatch("cone legs must share their source")
        if u.target != self.left.target or v.target != self.right.target:
            raise TypeMismatch("cone legs must land in the pullback feet")
        lookup = {pr: self.apex.carrier[k] for k, pr in enumerate(self.pairs)}
        out = []
        for pos in range(u.source.size):
            pt = lookup.get((u.map[pos], v.map[pos]))
            if pt is None:
                raise TypeMismatch("cone does not commute over the shared target")
            out.append(pt)
        return Epimorphism(u.source, self.apex, tuple(out))


def pullback(f: Epimorphism, g: Epimorphism) -> PullbackData:
    """Pullback of two epimorphisms onto a common target.

    The apex is the set of pairs agreeing over the target, realized inside
    the product cube (left coordinates first) and canonicalized.  Pairs of
    medians are medians coordinatewise, so the apex is median-closed by
    construction; both projections are onto because f and g are.
    """
    if f.target != g.target:
        raise TypeMismatch("pullback needs a shared target")
    A, B = f.source, g.source
    shift = B.dim
    raw = []
    for ia, a in enumerate(A.carrier):
        fa = f.map[ia]
        for ib, b in enumerate(B.carrier):
            if g.map[ib] == fa:
                raw.append((a << shift) | b)
    raw.sort()
    canon, relabel = canonicalize(MedianAlgebra(A.dim + B.dim, tuple(raw)))
    n = len(raw)
    lmap = [0] * n
    rmap = [0] * n
    pair_list: list[tuple[int, int]] = [(0, 0)] * n
    bmask = (1 << shift) - 1
    for k, ab in enumerate(raw):
        a, b = ab >> shift, ab & bmask
        pos = relabel[k]
        lmap[pos] = a
        rmap[pos] = b
        pair_list[pos] = (a, b)
    left = Epimorphism(canon, A, tuple(lmap))
    right = Epimorphism(canon, B, tuple(rmap))
    if set(lmap) != set(A.carrier) or set(rmap) != set(B.carrier):
        raise InternalInvariantViolation("pullback projections must be onto")
    aidx, bidx = A._index, B._index
    for k in range(n):
        if f.map[aidx[lmap[k]]] != g.map[bidx[rmap[k]]]:
            raise InternalInvariantViolation("pullback square does not commute")
    return PullbackData(canon, left, right, tuple(pair_list))
