"""Finite median algebras as median-closed subsets of a hypercube.

A point of an algebra of dimension ``dim`` is an int in ``[0, 2**dim)``.
Coordinate ``i`` of point ``p`` is bit ``dim - 1 - i``, so
``format(p, f"0{dim}b")`` spells the point with coordinate 0 leftmost.
The carrier is kept sorted ascending and the ternary operation is the
coordinatewise majority ``(a & b) | (a & c) | (b & c)``.

Subsets of a carrier are handled as bitmasks over carrier *positions*
(bit ``k`` = the ``k``-th smallest carrier point), which keeps the
convexity and halfspace machinery allocation-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AxiomViolation,
    BoundExceeded,
    EmbeddingNotFaithful,
    EmptyCarrier,
    EmptySide,
    GroundSizeTooLarge,
    InternalInvariantViolation,
    NotConvex,
    NotCovering,
    NotDisjoint,
    NotLinked,
    NotMedianClosed,
    ParseError,
    PointNotInCarrier,
    TypeMismatch,
)

BRUTE_FORCE_MAX_POINTS = 20
CONVEX_ENUM_MAX_POINTS = 16
SUPEREXTENSION_MAX_GROUND = 5
TABLE_MAX_SIZE = 12

# carrier size at which closure checking switches to the vectorized path
_NUMPY_CLOSURE_THRESHOLD = 32


def majority(a: int, b: int, c: int) -> int:
    """Coordinatewise majority of three bit vectors."""
    return (a & b) | (a & c) | (b & c)


def _reverse_bits(mask: int, n: int) -> int:
    if n == 0:
        return 0
    return int(format(mask, f"0{n}b")[::-1], 2)


def _mask_positions(mask: int) -> tuple[int, ...]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def point_to_str(p: int, dim: int) -> str:
    """Bitstring of a point, coordinate 0 leftmost.  Dimension 0 gives ''."""
    if dim == 0:
        return ""
    return format(p, f"0{dim}b")


def str_to_point(s: str, dim: int) -> int:
    """Inverse of point_to_str; raises ParseError on malformed input."""
    if not isinstance(s, str) or len(s) != dim or set(s) - {"0", "1"}:
        raise ParseError(f"expected a {dim}-character bitstring, got {s!r}")
    if dim == 0:
        return 0
    return int(s, 2)


@dataclass(frozen=True)
class MedianAlgebra:
    """A median-closed subset of the hypercube {0,1}**dim.

    ``canonical`` is set only by :func:`canonicalize` and records that the
    embedding is the canonical one: every coordinate induces a distinct
    proper bipartition of the carrier, coordinates appear in the canonical
    wall order, and the carrier is sorted.  Constructing an instance
    directly performs only cheap shape checks; median closure is
    :func:`validate`'s job.
    """

    dim: int
    carrier: tuple[int, ...]
    canonical: bool = False

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 0:
            raise ValueError(f"dim must be a nonnegative int, got {self.dim!r}")
        if not self.carrier:
            raise EmptyCarrier("an algebra needs at least one point")
        prev = -1
        for p in self.carrier:
            if not isinstance(p, int) or not 0 <= p < (1 << self.dim):
                raise ValueError(f"point {p!r} outside [0, 2**{self.dim})")
            if p <= prev:
                raise ValueError("carrier must be strictly ascending")
            prev = p

    @property
    def size(self) -> int:
        return len(self.carrier)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {p: k for k, p in enumerate(self.carrier)}

    def position(self, p: int | str) -> int:
        """Carrier position of a point given as an int or a bitstring."""
        if isinstance(p, str):
            p = str_to_point(p, self.dim)
        pos = self._index.get(p)
        if pos is None:
            raise PointNotInCarrier(
                f"{point_to_str(p, self.dim) if isinstance(p, int) else p!r}"
                f" is not a point of this algebra"
            )
        return pos

    def point(self, p: int | str) -> int:
        return self.carrier[self.position(p)]

    def point_strs(self) -> list[str]:
        return [point_to_str(p, self.dim) for p in self.carrier]

    def interval_mask(self, i: int, j: int) -> int:
        """Position mask of the interval between carrier positions i and j."""
        a, b = self.carrier[i], self.carrier[j]
        lo, hi = a & b, a | b
        out = 0
        for k, p in enumerate(self.carrier):
            if p & ~hi == 0 and lo & ~p == 0:
                out |= 1 << k
        return out

    @cached_property
    def wall_masks(self) -> tuple[tuple[int, int], ...]:
        """Distinct proper coordinate bipartitions as (side0, side1) position
        masks, with side0 containing position 0 (the binary-least point) and
        walls in canonical order: descending in the side0 indicator read
        with position 0 as its highest bit, so larger side0 comes first."""
        n = self.size
        full = (1 << n) - 1
        seen = set()
        walls = []
        for i in range(self.dim):
            bit = 1 << (self.dim - 1 - i)
            side1 = 0
            for k, p in enumerate(self.carrier):
                if p & bit:
                    side1 |= 1 << k
            side0 = full ^ side1
            if side0 == 0 or side1 == 0:
                continue
            if not side0 & 1:
                side0, side1 = side1, side0
            if (side0, side1) not in seen:
                seen.add((side0, side1))
                walls.append((side0, side1))
        walls.sort(key=lambda w: -_reverse_bits(w[0], n))
        return tuple(walls)

    @cached_property
    def interval_size_matrix(self) -> tuple[tuple[int, ...], ...]:
        """|interval(i, j)| for all position pairs.  Isomorphisms preserve
        these sizes, so the matrix doubles as a cheap pruning invariant."""
        if self.dim <= 63 and self.size <= 64:
            pts = np.asarray(self.carrier, dtype=np.uint64)
            meet = pts[:, None] & pts[None, :]
            join = pts[:, None] | pts[None, :]
            inside = ((pts[None, None, :] & ~join[:, :, None]) == 0) & (
                (meet[:, :, None] & ~pts[None, None, :]) == 0
            )
            return tuple(map(tuple, inside.sum(axis=2).tolist()))
        return tuple(
            tuple(
                self.interval_mask(i, j).bit_count() for j in range(self.size)
            )
            for i in range(self.size)
        )

    @cached_property
    def position_median_table(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """med as a position-level lookup table; only sensible for small
        carriers (the search routines that use it stay under 16 points)."""
        if self.dim <= 63 and self.size <= 64:
            pts = np.asarray(self.carrier, dtype=np.uint64)
            meet = pts[:, None] & pts[None, :]
            join = pts[:, None] | pts[None, :]
            med = meet[:, :, None] | (join[:, :, None] & pts[None, None, :])
            pos = np.searchsorted(pts, med)
            return tuple(
                tuple(map(tuple, layer)) for layer in pos.tolist()
            )
        car = self.carrier
        idx = self._index
        return tuple(
            tuple(
                tuple(idx[(a & b) | ((a | b) & c)] for c in car)
                for b in car
            )
            for a in car
        )

    def hull_mask(self, mask: int) -> int:
        """Convex hull of a position mask, as the intersection of all
        halfspace sides containing it.  Agrees with the pairwise interval
        closure computed by convex_hull."""
        if mask == 0:
            return 0
        out = (1 << self.size) - 1
        for s0, s1 in self.wall_masks:
            if mask & ~s0 == 0:
                out &= s0
            elif mask & ~s1 == 0:
                out &= s1
        return out

    def __repr__(self):
        pts = ",".join(self.point_strs())
        return f"MedianAlgebra(dim={self.dim}, {{{pts}}})"


def _closure_violation(carrier: Sequence[int], dim: int):
    """None if carrier is median-closed, else (a, b, c, m) with m missing.

    The witness is the lexicographically greatest position triple i < j < k
    that violates closure, found by scanning triples in descending order.
    """
    n = len(carrier)
    if n >= _NUMPY_CLOSURE_THRESHOLD and dim <= 63 and _closure_ok_numpy(carrier):
        return None
    members = set(carrier)
    for i in range(n - 3, -1, -1):
        a = carrier[i]
        for j in range(n - 2, i, -1):
            ab = a & carrier[j]
            a_or = a | carrier[j]
            for k in range(n - 1, j, -1):
                c = carrier[k]
                m = ab | (a_or & c)
                if m not in members:
                    return a, carrier[j], c, m
    return None


def _closure_ok_numpy(carrier: Sequence[int]) -> bool:
    arr = np.asarray(carrier, dtype=np.uint64)
    rows = arr[:, None]
    cols = arr[None, :]
    base = rows & cols
    for a in arr:
        meds = base | (a & rows) | (a & cols)
        if not np.isin(meds, arr).all():
            return False
    return True


def validate(points: Iterable[int | str], dim: int) -> MedianAlgebra:
    """Check a point list and return the algebra it spans.

    Points may be ints or bitstrings.  Raises EmptyCarrier for no points,
    ParseError for malformed or duplicate points, and NotMedianClosed
    (with a witness triple) when some majority lands outside the set.
    """
    if not isinstance(dim, int) or dim < 0:
        raise ParseError(f"dim must be a nonnegative int, got {dim!r}")
    carrier = []
    seen = set()
    for raw in points:
        if isinstance(raw, str):
            p = str_to_point(raw, dim)
        elif isinstance(raw, int) and not isinstance(raw, bool):
            p = raw
            if not 0 <= p < (1 << dim):
                raise ParseError(f"point {p} outside [0, 2**{dim})")
        else:
            raise ParseError(f"point {raw!r} is neither an int nor a bitstring")
        if p in seen:
            raise ParseError(f"duplicate point {point_to_str(p, dim)}")
        seen.add(p)
        carrier.append(p)
    if not carrier:
        raise EmptyCarrier("an algebra needs at least one point")
    carrier = tuple(sorted(carrier))
    viol = _closure_violation(carrier, dim)
    if viol is not None:
        a, b, c, m = viol
        strs = tuple(point_to_str(x, dim) for x in (a, b, c))
        raise NotMedianClosed(
            f"majority of ({strs[0]}, {strs[1]}, {strs[2]}) is "
            f"{point_to_str(m, dim)}, which is missing",
            witness=(a, b, c),
            missing=m,
        )
    return MedianAlgebra(dim, carrier)


def median(algebra: MedianAlgebra, a: int | str, b: int | str, c: int | str) -> int:
    """Majority point of three carrier points."""
    pa, pb, pc = algebra.point(a), algebra.point(b), algebra.point(c)
    m = majority(pa, pb, pc)
    if m not in algebra._index:
        raise NotMedianClosed(
            "algebra is not median-closed; run validate() on its points",
            witness=(pa, pb, pc),
            missing=m,
        )
    return m


@dataclass(frozen=True)
class ConvexSet:
    """Subset of a carrier stored as a position bitmask.

    The constructor trusts its input; use :func:`convex_set` to have
    interval closure checked.  ``members`` lists carrier positions,
    ``points`` the corresponding point ints.
    """

    algebra: MedianAlgebra
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.algebra.size):
            raise ValueError("mask has bits outside the carrier")

    @property
    def members(self) -> tuple[int, ...]:
        return _mask_positions(self.mask)

    @property
    def points(self) -> tuple[int, ...]:
        return tuple(self.algebra.carrier[k] for k in self.members)

    def point_strs(self) -> list[str]:
        return [point_to_str(p, self.algebra.dim) for p in self.points]

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __len__(self):
        return self.mask.bit_count()

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p: int | str) -> bool:
        try:
            pos = self.algebra.position(p)
        except PointNotInCarrier:
            return False
        return bool((self.mask >> pos) & 1)

    def __repr__(self):
        return f"ConvexSet({{{','.join(self.point_strs())}}})"


def _resolve_mask(algebra: MedianAlgebra, points) -> int:
    if isinstance(points, ConvexSet):
        if points.algebra != algebra:
            raise TypeMismatch("set belongs to a different algebra")
        return points.mask
    mask = 0
    for p in points:
        mask |= 1 << algebra.position(p)
    return mask


def interval(algebra: MedianAlgebra, a: int | str, b: int | str) -> ConvexSet:
    """The interval [a, b]: all points between a and b coordinatewise."""
    i, j = algebra.position(a), algebra.position(b)
    return ConvexSet(algebra, algebra.interval_mask(i, j))


def convex_hull(algebra: MedianAlgebra, points) -> ConvexSet:
    """Smallest convex superset, by iterating pairwise interval closure."""
    mask = _resolve_mask(algebra, points)
    while True:
        new = mask
        mems = _mask_positions(mask)
        for x in range(len(mems)):
            for y in range(x + 1, len(mems)):
                new |= algebra.interval_mask(mems[x], mems[y])
        if new == mask:
            return ConvexSet(algebra, mask)
        mask = new


def convex_set(algebra: MedianAlgebra, points, *, check: bool = True) -> ConvexSet:
    """Build a ConvexSet from points, verifying convexity unless check=False."""
    mask = _resolve_mask(algebra, points)
    if check:
        hull = convex_hull(algebra, ConvexSet(algebra, mask)).mask
        if hull != mask:
            extra = _mask_positions(hull & ~mask)[0]
            raise NotConvex(
                f"set is not convex: its hull also contains "
                f"{point_to_str(algebra.carrier[extra], algebra.dim)}"
            )
    return ConvexSet(algebra, mask)


@dataclass(frozen=True)
class Halfspace:
    """An ordered bipartition of a carrier into two convex sides.

    Proper halfspaces have both sides nonempty; the improper ones
    (empty side against the whole carrier) appear as search witnesses.
    """

    algebra: MedianAlgebra
    side0: ConvexSet
    side1: ConvexSet

    def __post_init__(self):
        if self.side0.algebra != self.algebra or self.side1.algebra != self.algebra:
            raise TypeMismatch("halfspace sides must live in the named algebra")
        if self.side0.mask & self.side1.mask:
            raise NotDisjoint("halfspace sides overlap")
        if self.side0.mask | self.side1.mask != (1 << self.algebra.size) - 1:
            raise NotCovering("halfspace sides must cover the carrier")

    @property
    def proper(self) -> bool:
        return self.side0.mask != 0 and self.side1.mask != 0

    def flip(self) -> "Halfspace":
        return Halfspace(self.algebra, self.side1, self.side0)

    def __repr__(self):
        return (
            f"Halfspace({{{','.join(self.side0.point_strs())}}} | "
            f"{{{','.join(self.side1.point_strs())}}})"
        )


def halfspaces(algebra: MedianAlgebra) -> list[Halfspace]:
    """All proper halfspaces, in canonical wall order.

    Every proper halfspace of a median-closed carrier is the trace of a
    coordinate bipartition, so this just dresses up wall_masks; see
    brute_force_halfspaces for the definition-chasing check.
    """
    return [
        Halfspace(algebra, ConvexSet(algebra, s0), ConvexSet(algebra, s1))
        for s0, s1 in algebra.wall_masks
    ]


def brute_force_halfspaces(algebra: MedianAlgebra) -> list[Halfspace]:
    """Proper halfspaces by scanning all subsets for convex/co-convex pairs.

    Exponential in the carrier size; refuses more than
    BRUTE_FORCE_MAX_POINTS points.  Used as an independent oracle for
    halfspaces(); the two agree including order.
    """
    n = algebra.size
    if n > BRUTE_FORCE_MAX_POINTS:
        raise BoundExceeded(
            f"brute force over 2**{n} subsets refused (max {BRUTE_FORCE_MAX_POINTS} points)"
        )
    if n == 1:
        return []
    masks = np.arange(1 << n, dtype=np.int64)
    convex = np.ones(1 << n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            imask = np.int64(algebra.interval_mask(i, j))
            sel = ((masks >> i) & (masks >> j) & 1).astype(bool)
            ok = (masks & imask) == imask
            np.logical_and(convex, ~sel | ok, out=convex)
    full = np.int64((1 << n) - 1)
    keep = convex & convex[full ^ masks] & (masks != 0) & (masks != full) & ((masks & 1) == 1)
    sides = sorted((int(m) for m in masks[keep]), key=lambda s: -_reverse_bits(s, n))
    full_i = (1 << n) - 1
    return [
        Halfspace(algebra, ConvexSet(algebra, s0), ConvexSet(algebra, full_i ^ s0))
        for s0 in sides
    ]


def halfspace_from_side(algebra: MedianAlgebra, points) -> Halfspace:
    """Halfspace whose side0 is the given point set.

    The set must be one side of a proper halfspace, or empty, or the whole
    carrier (the improper cases).  Raises NotConvex otherwise.
    """
    mask = _resolve_mask(algebra, points)
    full = (1 << algebra.size) - 1
    if mask in (0, full):
        return Halfspace(algebra, ConvexSet(algebra, mask), ConvexSet(algebra, full ^ mask))
    for s0, s1 in algebra.wall_masks:
        if mask == s0 or mask == s1:
            return Halfspace(
                algebra, ConvexSet(algebra, mask), ConvexSet(algebra, full ^ mask)
            )
    raise NotConvex("the given set is not a halfspace of this algebra")


def separate_convex(algebra: MedianAlgebra, a_points, b_points) -> Halfspace:
    """Separate two disjoint nonempty convex sets by a halfspace.

    Returns the first halfspace in canonical order with the second set
    inside side0 and the first inside side1.  Existence is guaranteed for
    convex inputs, so a failed search means the algebra is corrupt.
    """
    amask = _resolve_mask(algebra, a_points)
    bmask = _resolve_mask(algebra, b_points)
    if amask == 0 or bmask == 0:
        raise EmptySide("both sets must be nonempty")
    if amask & bmask:
        raise NotDisjoint("the sets to separate overlap")
    for name, mask in (("first", amask), ("second", bmask)):
        if algebra.hull_mask(mask) != mask:
            raise NotConvex(f"the {name} set is not convex")
    for s0, s1 in algebra.wall_masks:
        if bmask & ~s0 == 0 and amask & ~s1 == 0:
            return Halfspace(algebra, ConvexSet(algebra, s0), ConvexSet(algebra, s1))
        if bmask & ~s1 == 0 and amask & ~s0 == 0:
            return Halfspace(algebra, ConvexSet(algebra, s1), ConvexSet(algebra, s0))
    raise InternalInvariantViolation(
        "no separating halfspace found for disjoint convex sets"
    )


# ---------------------------------------------------------------------------
# canonical form


def _normalize_once(state):
    dim, carrier = state
    n = len(carrier)
    walls = MedianAlgebra(dim, carrier).wall_masks
    d = len(walls)
    vals = []
    for k in range(n):
        v = 0
        for j, (s0, _) in enumerate(walls):
            if not (s0 >> k) & 1:
                v |= 1 << (d - 1 - j)
        vals.append(v)
    order = sorted(range(n), key=lambda k: vals[k])
    step = [0] * n
    for newpos, k in enumerate(order):
        step[k] = newpos
    return (d, tuple(vals[k] for k in order)), tuple(step)


def canonicalize(algebra: MedianAlgebra) -> tuple[MedianAlgebra, tuple[int, ...]]:
    """Canonical re-embedding of a valid algebra.

    Coordinates are replaced by one indicator per wall (point bit j set
    iff the point lies outside side0 of wall j, so the binary-least point
    becomes all zeros), walls taken in canonical order, carrier re-sorted,
    and the rewrite iterated to a fixed point.  Re-sorting can reorder the
    walls, which is why iteration is needed; in the cyclic case the state
    with the least carrier wins.  Returns (canonical_algebra, relabel)
    where relabel[k] is the canonical position of the point at position k
    of the input.

    Equal canonical forms imply isomorphism.  The converse direction is
    not guaranteed by this labeling, so isomorphism testing treats equal
    forms as a fast accept only.
    """
    state = (algebra.dim, algebra.carrier)
    perm = tuple(range(algebra.size))
    path = []
    seen = {}
    while state not in seen:
        seen[state] = len(path)
        path.append((state, perm))
        state, step = _normalize_once(state)
        perm = tuple(step[k] for k in perm)
    cycle = path[seen[state]:]
    (dim, carrier), best_perm = min(cycle, key=lambda sp: sp[0])
    return MedianAlgebra(dim, carrier, canonical=True), best_perm


# ---------------------------------------------------------------------------
# quotients


def quotient_by_halfspaces(algebra, family):
    """Collapse the algebra to the coordinates named by a halfspace family.

    Two points are identified when no family member separates them.  The
    class of a point is its vector of family sides, which gives a
    median-closed image; the result is returned canonicalized, together
    with the quotient epimorphism.  An empty family collapses everything
    to a single point.
    """
    from .morphisms import Epimorphism, check_epimorphism

    fam = list(family)
    for h in fam:
        if not isinstance(h, Halfspace):
            raise TypeMismatch(f"expected Halfspace, got {type(h).__name__}")
        if h.algebra != algebra:
            raise TypeMismatch("family member lives in a different algebra")
    d = len(fam)
    sigs = []
    for pos in range(algebra.size):
        v = 0
        for j, h in enumerate(fam):
            if (h.side1.mask >> pos) & 1:
                v |= 1 << (d - 1 - j)
        sigs.append(v)
    raw_carrier = tuple(sorted(set(sigs)))
    viol = _closure_violation(raw_carrier, d)
    if viol is not None:
        raise InternalInvariantViolation("quotient image is not median-closed")
    canon, relabel = canonicalize(MedianAlgebra(d, raw_carrier))
    raw_index = {p: k for k, p in enumerate(raw_carrier)}
    mapping = tuple(canon.carrier[relabel[raw_index[s]]] for s in sigs)
    epi = Epimorphism(algebra, canon, mapping)
    if algebra.size <= 64:
        check_epimorphism(epi)
    return canon, epi


# ---------------------------------------------------------------------------
# convex set enumeration


def _convex_masks(algebra: MedianAlgebra) -> tuple[int, ...]:
    """All convex position masks (including empty and full), ascending.

    Every convex set is an intersection of halfspace sides, so a DFS over
    walls with branches skip / keep side0 / keep side1 reaches exactly the
    convex sets.  Memoized on (wall index, mask) to tame the branching.
    """
    walls = algebra.wall_masks
    out = {0}
    seen = set()
    stack = [(0, (1 << algebra.size) - 1)]
    while stack:
        j, mask = stack.pop()
        if (j, mask) in seen:
            continue
        seen.add((j, mask))
        if mask == 0 or j == len(walls):
            out.add(mask)
            continue
        s0, s1 = walls[j]
        stack.append((j + 1, mask))
        stack.append((j + 1, mask & s0))
        stack.append((j + 1, mask & s1))
    return tuple(sorted(out))


def enumerate_convex_sets(
    algebra: MedianAlgebra, *, max_size: int = CONVEX_ENUM_MAX_POINTS
) -> list[ConvexSet]:
    """Every convex subset, the empty set and the full carrier included.

    Ordered by (size, mask).  Refuses carriers above max_size points;
    raise the bound explicitly if you mean it.
    """
    if algebra.size > max_size:
        raise BoundExceeded(
            f"convex enumeration on {algebra.size} points exceeds max_size={max_size}"
        )
    masks = sorted(_convex_masks(algebra), key=lambda m: (m.bit_count(), m))
    return [ConvexSet(algebra, m) for m in masks]


# ---------------------------------------------------------------------------
# maximal linked systems and superextensions


@dataclass(frozen=True)
class MaximalLinkedSystem:
    """A maximal family of pairwise intersecting subsets of a ground set.

    Subsets are bitmasks over ``range(ground_size)``.  Maximality is
    equivalent to holding exactly one side of every complementary pair
    (plus the full set), which the constructor verifies.
    """

    ground_size: int
    family: tuple[int, ...]

    def __post_init__(self):
        g = self.ground_size
        if not isinstance(g, int) or g < 1:
            raise ValueError(f"ground_size must be a positive int, got {g!r}")
        full = (1 << g) - 1
        fam = self.family
        if len(set(fam)) != len(fam) or tuple(sorted(fam)) != fam:
            raise ValueError("family must be sorted and duplicate-free")
        for a in fam:
            if not 0 < a <= full:
                raise ValueError(f"subset {a!r} outside the ground set")
        for x, y in itertools.combinations(fam, 2):
            if not x & y:
                raise NotLinked(
                    f"members {x:0{g}b} and {y:0{g}b} are disjoint"
                )
        famset = set(fam)
        for a in range(1, full + 1):
            if a not in famset and all(a & m for m in fam):
                raise AxiomViolation(
                    "family is linked but not maximal", witness=a
                )

    def __contains__(self, subset_mask: int) -> bool:
        return subset_mask in set(self.family)

    def __len__(self):
        return len(self.family)


def _linked_families(ground_size: int) -> list[tuple[int, ...]]:
    """All maximal linked families over the ground set, in a fixed order.

    A maximal family picks exactly one set from each complementary pair of
    proper nonempty subsets, plus the full set; backtracking over the
    pairs (represented by the sets containing element 0, ascending) with a
    linkedness prune enumerates them all.
    """
    full = (1 << ground_size) - 1
    reps = [m for m in range(1, full) if m & 1]
    out = []
    chosen = []

    def go(idx):
        if idx == len(reps):
            out.append(tuple(sorted(chosen + [full])))
            return
        a = reps[idx]
        for cand in (a, full ^ a):
            if all(cand & c for c in chosen):
                chosen.append(cand)
                go(idx + 1)
                chosen.pop()

    go(0)
    return out


def superextension(
    n: int, *, max_ground: int = SUPEREXTENSION_MAX_GROUND
) -> tuple[MedianAlgebra, list[MaximalLinkedSystem]]:
    """The superextension of an n-element set as a canonical median algebra.

    Points are the maximal linked systems over the ground set, embedded by
    one coordinate per complementary pair of proper subsets (bit set iff
    the pair's 0-side representative is absent from the system, so the
    system of all sets containing element 0 lands on all-zeros).  Returns
    the canonicalized algebra together with the systems in carrier order.

    Growth is doubly exponential; ground sets above max_ground are refused.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"ground size must be a positive int, got {n!r}")
    if n > max_ground:
        raise GroundSizeTooLarge(
            f"superextension of an {n}-set refused (max ground {max_ground})"
        )
    systems = [MaximalLinkedSystem(n, fam) for fam in _linked_families(n)]
    full = (1 << n) - 1
    reps = [m for m in range(1, full) if m & 1]
    d = len(reps)
    raw = []
    for s in systems:
        famset = set(s.family)
        v = 0
        for j, a in enumerate(reps):
            if a not in famset:
                v |= 1 << (d - 1 - j)
        raw.append(v)
    raw_carrier = tuple(sorted(raw))
    if len(raw_carrier) != len(systems):
        raise InternalInvariantViolation("superextension embedding collided")
    viol = _closure_violation(raw_carrier, d)
    if viol is not None:
        raise InternalInvariantViolation("superextension image is not median-closed")
    canon, relabel = canonicalize(MedianAlgebra(d, raw_carrier))
    raw_index = {p: k for k, p in enumerate(raw_carrier)}
    ordered: list[MaximalLinkedSystem | None] = [None] * len(systems)
    for i, s in enumerate(systems):
        ordered[relabel[raw_index[raw[i]]]] = s
    return canon, ordered  # type: ignore[return-value]


def mls_median(
    x: MaximalLinkedSystem, y: MaximalLinkedSystem, z: MaximalLinkedSystem
) -> MaximalLinkedSystem:
    """Median of three maximal linked systems: sets lying in at least two.

    This is the operation the superextension embedding transports to
    coordinatewise majority.
    """
    if not x.ground_size == y.ground_size == z.ground_size:
        raise TypeMismatch("systems live over different ground sets")
    xs, ys, zs = set(x.family), set(y.family), set(z.family)
    fam = tuple(
        sorted(
            a
            for a in xs | ys | zs
            if (a in xs) + (a in ys) + (a in zs) >= 2
        )
    )
    return MaximalLinkedSystem(x.ground_size, fam)


# ---------------------------------------------------------------------------
# abstract tables


def from_median_table(
    n: int, table, *, max_size: int = TABLE_MAX_SIZE
) -> MedianAlgebra:
    """Embed an abstract ternary table med: [n]^3 -> [n] into a hypercube.

    Checks the directly detectable axioms (symmetry and absorption), then
    builds one coordinate per two-valued homomorphism of the table.  If
    the resulting map fails to separate the elements the table is not a
    median algebra and EmbeddingNotFaithful is raised; when it does
    separate, median preservation holds coordinatewise by construction.
    Returns the canonical form of the image.
    """
    if not isinstance(n, int) or n < 1:
        raise EmptyCarrier("the table needs at least one element")
    if n > max_size:
        raise BoundExceeded(f"table on {n} elements exceeds max_size={max_size}")
    tbl = []
    table = list(table)
    if len(table) != n:
        raise ParseError(f"table must have {n} layers")
    for layer in table:
        layer = list(layer)
        if len(layer) != n:
            raise ParseError("table layers must be n x n")
        rows = []
        for row in layer:
            row = tuple(row)
            if len(row) != n or any(
                not isinstance(v, int) or not 0 <= v < n for v in row
            ):
                raise ParseError("table entries must be ints in range(n)")
            rows.append(row)
        tbl.append(tuple(rows))

    def med(a, b, c):
        return tbl[a][b][c]

    for a in range(n):
        for b in range(n):
            if med(a, a, b) != a:
                raise AxiomViolation(
                    f"med({a},{a},{b}) = {med(a, a, b)}, expected {a}",
                    witness=(a, a, b),
                )
            for c in range(n):
                v = med(a, b, c)
                for perm in ((a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
                    if med(*perm) != v:
                        raise AxiomViolation(
                            f"med{perm} = {med(*perm)} but med({a},{b},{c}) = {v}",
                            witness=perm,
                        )

    # two-valued homomorphisms containing element 0, proper ones only
    reps = []
    for smask in range(1 << n):
        if not smask & 1 or smask == (1 << n) - 1:
            continue
        if _is_table_hom(tbl, n, smask):
            reps.append(smask)
    d = len(reps)
    points = []
    for e in range(n):
        v = 0
        for j, smask in enumerate(reps):
            if not (smask >> e) & 1:
                v |= 1 << (d - 1 - j)
        points.append(v)
    if len(set(points)) != n:
        raise EmbeddingNotFaithful(
            "two-valued homomorphisms do not separate the elements; "
            "the table is not a median algebra"
        )
    raw = MedianAlgebra(d, tuple(sorted(points)))
    viol = _closure_violation(raw.carrier, d)
    if viol is not None:
        raise InternalInvariantViolation("table image is not median-closed")
    canon, _ = canonicalize(raw)
    return canon


def _is_table_hom(tbl, n, smask) -> bool:
    # indicator must send med to the majority of indicators on every triple;
    # symmetry was verified already, so ordered pairs a <= b suffice
    for a in range(n):
        ia = (smask >> a) & 1
        for b in range(a, n):
            ib = (smask >> b) & 1
            row = tbl[a][b]
            if ia == ib:
                for c in range(n):
                    if ((smask >> row[c]) & 1) != ia:
                        return False
            else:
                for c in range(n):
                    if ((smask >> row[c]) & 1) != ((smask >> c) & 1):
                        return False
    return True
