"""Approximation sequences of finite median algebras.

The engine grows inverse sequences of finite algebras whose bonds are
epimorphisms, one saturation step at a time.  A saturation step over a
size bound resolves every extension problem (p: K -> M, f: N -> M) up to
simultaneous isomorphism by threading pullbacks into a tower; the step
returns the new stage, the bond, and a certificate recording one witness
per resolved problem.  On top of that sit the finitized halfspace
checkers, the stagewise extension property test, and the back-and-forth
interleaving of two sequences.
"""

from __future__ import annotations

import os
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    BoundExceeded,
    EmptySide,
    IndexOutOfRange,
    InternalInvariantViolation,
    NotConvex,
    NotCovering,
    NotDisjoint,
    NotLinked,
    ResourceLimit,
    TypeMismatch,
)
from .median_core import (
    ConvexSet,
    Halfspace,
    MedianAlgebra,
    _closure_violation,
    _convex_masks,
    _mask_positions,
    _resolve_mask,
    canonicalize,
    halfspace_from_side,
    majority,
)
from .morphisms import (
    Epimorphism,
    automorphisms,
    compose,
    enumerate_epis,
    find_isomorphism,
    identity,
    pullback,
)

CORPUS_MAX_POINTS = 12
SATURATION_MAX_BOUND = 8
DEFAULT_STAGE_CAP = 4096
STAGE_CAP_ENV = "MEDIAN_FRAISSE_CAP"

_GENERIC_SEARCH_MAX = 12


def _stage_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get(STAGE_CAP_ENV, DEFAULT_STAGE_CAP))


# ---------------------------------------------------------------------------
# splits and covers


@dataclass(frozen=True)
class SplitData:
    """A convex cover (A, B) of an algebra, ready to be split along.

    Both sets must be nonempty convex and their union must be the whole
    carrier; they may overlap (the overlap is what gets doubled).
    """

    base: MedianAlgebra
    A: ConvexSet
    B: ConvexSet

    def __post_init__(self):
        for side in (self.A, self.B):
            if side.algebra != self.base:
                raise TypeMismatch("cover sides must live in the base algebra")
            if side.mask == 0:
                raise EmptySide("cover sides must be nonempty")
            if self.base.hull_mask(side.mask) != side.mask:
                raise NotConvex("cover sides must be convex")
        if self.A.mask | self.B.mask != (1 << self.base.size) - 1:
            raise NotCovering("the two sets must cover the carrier")


def split_extension(data: SplitData) -> tuple[MedianAlgebra, Epimorphism]:
    """Split an algebra along a convex cover.

    A fresh last coordinate is appended: points of A get a 0 copy, points
    of B a 1 copy, so overlap points double and the result has
    |base| + |A meet B| points.  Returns the canonicalized extension with
    the projection that forgets the new coordinate.
    """
    base = data.base
    raw = []
    origin = {}
    for pos, p in enumerate(base.carrier):
        if (data.A.mask >> pos) & 1:
            raw.append(p << 1)
            origin[p << 1] = p
        if (data.B.mask >> pos) & 1:
            raw.append((p << 1) | 1)
            origin[(p << 1) | 1] = p
    raw.sort()
    viol = _closure_violation(tuple(raw), base.dim + 1)
    if viol is not None:
        raise InternalInvariantViolation("split of a convex cover must stay closed")
    canon, relabel = canonicalize(MedianAlgebra(base.dim + 1, tuple(raw)))
    proj = [0] * len(raw)
    for k, rp in enumerate(raw):
        proj[relabel[k]] = origin[rp]
    epi = Epimorphism(canon, base, tuple(proj))
    overlap = data.A.mask & data.B.mask
    fibers = Counter(epi.map)
    for pos, p in enumerate(base.carrier):
        want = 2 if (overlap >> pos) & 1 else 1
        if fibers[p] != want:
            raise InternalInvariantViolation("split fibers have the wrong size")
    return canon, epi


def enumerate_convex_covers(
    algebra: MedianAlgebra,
    *,
    max_total: int | None = None,
    max_size: int = 16,
) -> list[tuple[ConvexSet, ConvexSet]]:
    """All unordered pairs of nonempty convex sets covering the carrier.

    With max_total set, only covers whose split would stay within
    max_total points are produced, i.e. |carrier| + |overlap| <= max_total;
    that prune keeps the enumeration tame on algebras with many convex
    sets.  Pairs are ordered by (size, mask) of their smaller member.
    """
    n = algebra.size
    if n > max_size:
        raise BoundExceeded(
            f"cover enumeration on {n} points exceeds max_size={max_size}"
        )
    full = (1 << n) - 1
    masks = [m for m in _convex_masks(algebra) if m]
    budget = None if max_total is None else max_total - n
    if budget is not None and budget < 0:
        return []
    out = []
    for i, e in enumerate(masks):
        for f in masks[i:]:
            if e | f != full:
                continue
            if budget is not None and (e & f).bit_count() > budget:
                continue
            out.append((e, f))
    out.sort(key=lambda ef: ((ef[0].bit_count(), ef[0]), (ef[1].bit_count(), ef[1])))
    return [
        (ConvexSet(algebra, e), ConvexSet(algebra, f)) for e, f in out
    ]


# ---------------------------------------------------------------------------
# the algebra corpus


def _invariant_key(algebra: MedianAlgebra):
    sides = tuple(
        sorted(min(s0.bit_count(), s1.bit_count()) for s0, s1 in algebra.wall_masks)
    )
    profile = tuple(
        sorted(tuple(sorted(row)) for row in algebra.interval_size_matrix)
    )
    return algebra.size, algebra.dim, sides, profile


@lru_cache(maxsize=16)
def _algebra_classes(max_size: int) -> tuple[MedianAlgebra, ...]:
    one = MedianAlgebra(0, (0,), canonical=True)
    classes = [one]
    seen_forms = {(one.dim, one.carrier)}
    buckets: dict[tuple, list[MedianAlgebra]] = {_invariant_key(one): [one]}
    queue = deque([one])
    while queue:
        k_alg = queue.popleft()
        if k_alg.size >= max_size:
            continue
        for ca, cb in enumerate_convex_covers(k_alg, max_total=max_size):
            if ca.mask & cb.mask == 0:
                continue  # disjoint cover: the split is just a relabeling
            new_alg, _ = split_extension(SplitData(k_alg, ca, cb))
            form = (new_alg.dim, new_alg.carrier)
            if form in seen_forms:
                continue
            seen_forms.add(form)
            bkey = _invariant_key(new_alg)
            bucket = buckets.setdefault(bkey, [])
            if any(find_isomorphism(new_alg, other) is not None for other in bucket):
                continue
            bucket.append(new_alg)
            classes.append(new_alg)
            queue.append(new_alg)
    classes.sort(key=lambda a: (a.size, a.dim, a.carrier))
    return tuple(classes)


def enumerate_algebras(max_size: int) -> list[MedianAlgebra]:
    """One canonical representative per isomorphism class up to max_size.

    Built breadth-first from the one-point algebra by splitting along
    overlapping convex covers, which reaches every finite median algebra.
    Representatives are deduplicated up to isomorphism (the canonical
    form is used as a fast accept, with a search fallback) and sorted by
    (size, dim, carrier).
    """
    if not isinstance(max_size, int) or max_size < 1:
        raise ValueError(f"max_size must be a positive int, got {max_size!r}")
    if max_size > CORPUS_MAX_POINTS:
        raise BoundExceeded(
            f"corpus enumeration beyond {CORPUS_MAX_POINTS} points refused"
        )
    return list(_algebra_classes(max_size))


# ---------------------------------------------------------------------------
# saturation


@dataclass(frozen=True)
class CertificateEntry:
    """One resolved extension problem of a saturation step.

    ``stage_map: K -> image`` and ``extender_map: extender -> image`` pose
    the problem; ``witness: L -> extender`` solves it, in the sense that
    extender_map . witness equals stage_map . bond.
    """

    image: MedianAlgebra
    extender: MedianAlgebra
    stage_map: Epimorphism
    extender_map: Epimorphism
    witness: Epimorphism


def _orbit_min_key(p: Epimorphism, f: Epimorphism):
    """Least (p, f) image pair over simultaneous isomorphisms of image and
    extender; used to keep exactly one representative per orbit."""
    m_alg, n_alg = p.target, f.source
    best = None
    for phi in automorphisms(m_alg):
        pp = compose(phi, p).map
        pf = compose(phi, f)
        for psi in automorphisms(n_alg):
            inv = [0] * n_alg.size
            for upos, vpos in enumerate(psi.position_map):
                inv[vpos] = upos
            ff = tuple(pf.map[inv[v]] for v in range(n_alg.size))
            key = (pp, ff)
            if best is None or key < best:
                best = key
    return best


def saturation_step(
    algebra: MedianAlgebra,
    *,
    size_bound: int,
    cap: int | None = None,
    order: str = "canonical",
) -> tuple[MedianAlgebra, Epimorphism, tuple[CertificateEntry, ...]]:
    """One saturation step over all extension problems within a size bound.

    An extension problem is a pair of epimorphisms p: K -> M, f: N -> M
    with M, N drawn from the corpus of algebras of at most size_bound
    points and f not bijective (bijective f carries no content).  Problems
    are deduplicated up to simultaneous isomorphism of M and N and sorted
    by (|M|, |N|, corpus position of M, corpus position of N, p, f);
    order="reversed" processes the same list backwards.  Each problem is
    resolved by a pullback threaded onto the current tower top, so the
    returned stage L solves all of them at once; the certificate holds one
    witness q per problem with extender_map . q == stage_map . bond.

    If any intermediate tower algebra would exceed the stage cap the whole
    step is refused with ResourceLimit; nothing is ever truncated.  The
    default cap is 4096, overridable by the MEDIAN_FRAISSE_CAP variable or
    the cap argument.
    """
    if not isinstance(size_bound, int) or size_bound < 1:
        raise ValueError(f"size_bound must be a positive int, got {size_bound!r}")
    if size_bound > SATURATION_MAX_BOUND:
        raise BoundExceeded(
            f"saturation over bound {size_bound} refused (max {SATURATION_MAX_BOUND})"
        )
    if order not in ("canonical", "reversed"):
        raise ValueError(f"order must be 'canonical' or 'reversed', got {order!r}")
    cap_val = _stage_cap(cap)
    corpus = enumerate_algebras(size_bound)
    problems = []
    for mi, m_alg in enumerate(corpus):
        if m_alg.size > algebra.size:
            continue
        stage_maps = enumerate_epis(algebra, m_alg, max_size=None)
        if not stage_maps:
            continue
        for ni, n_alg in enumerate(corpus):
            if n_alg.size <= m_alg.size:
                continue  # an epi N -> M with |N| <= |M| would be bijective
            ext_maps = enumerate_epis(n_alg, m_alg, max_size=None)
            for p in stage_maps:
                for f in ext_maps:
                    if (p.map, f.map) == _orbit_min_key(p, f):
                        problems.append((m_alg.size, n_alg.size, mi, ni, p, f))
    problems.sort(key=lambda t: (t[0], t[1], t[2], t[3], t[4].map, t[5].map))
    if order == "reversed":
        problems.reverse()

    tower_top = algebra
    bond = identity(algebra)
    resolved = []
    for _, _, _, _, p, f in problems:
        onto_image = compose(p, bond)
        fib_stage = Counter(onto_image.map)
        fib_ext = Counter(f.map)
        predicted = sum(fib_stage[c] * fib_ext[c] for c in p.target.carrier)
        if predicted > cap_val:
            raise ResourceLimit(
                f"tower would reach {predicted} points, over the stage cap "
                f"{cap_val}; raise cap or {STAGE_CAP_ENV}"
            )
        square = pullback(onto_image, f)
        tower_top = square.apex
        bond = compose(bond, square.left)
        resolved.append((p, f, square.left, square.right))

    # witness for step i composes its pullback projection with the bonds of
    # all later steps; walking backwards shares the suffix composites
    witnesses: list[Epimorphism] = [None] * len(resolved)  # type: ignore[list-item]
    suffix = identity(tower_top)
    for idx in range(len(resolved) - 1, -1, -1):
        p, f, left, right = resolved[idx]
        witnesses[idx] = compose(right, suffix)
        suffix = compose(left, suffix)
    if resolved and suffix.map != bond.map:
        raise InternalInvariantViolation("suffix composites disagree with the bond")

    certificate = []
    for (p, f, _, _), q in zip(resolved, witnesses):
        if compose(f, q).map != compose(p, bond).map:
            raise InternalInvariantViolation(
                "certificate square does not commute"
            )
        certificate.append(
            CertificateEntry(
                image=p.target,
                extender=f.source,
                stage_map=p,
                extender_map=f,
                witness=q,
            )
        )
    return tower_top, bond, tuple(certificate)


# ---------------------------------------------------------------------------
# inverse sequences


@dataclass(frozen=True)
class StartProvenance:
    """Marks a stage given from outside rather than constructed."""


@dataclass(frozen=True)
class SaturationProvenance:
    """Records how a stage arose from the previous one by saturation.

    The certificate is optional because sequences reloaded from disk may
    carry only the shape of the construction, not the witnesses.
    """

    size_bound: int
    order: str
    certificate: tuple[CertificateEntry, ...] | None = None


@dataclass(frozen=True)
class SplitProvenance:
    """Records a stage obtained by splitting along a convex cover."""

    split: SplitData


@dataclass(frozen=True)
class InverseSequence:
    """Stages with backward bonds: bonds[i] maps stages[i+1] onto stages[i].

    ``provenance`` runs parallel to ``stages`` and tells where each stage
    came from.
    """

    stages: tuple[MedianAlgebra, ...]
    bonds: tuple[Epimorphism, ...]
    provenance: tuple[object, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a sequence needs at least one stage")
        if len(self.bonds) != len(self.stages) - 1:
            raise TypeMismatch("expected one bond per adjacent stage pair")
        if len(self.provenance) != len(self.stages):
            raise TypeMismatch("expected one provenance record per stage")
        for i, b in enumerate(self.bonds):
            if b.source != self.stages[i + 1] or b.target != self.stages[i]:
                raise TypeMismatch(f"bond {i} does not join stages {i + 1} and {i}")

    def __len__(self):
        return len(self.stages)


def composite_projection(seq: InverseSequence, alpha: int, beta: int) -> Epimorphism:
    """The bond composite from stages[beta] down to stages[alpha]."""
    last = len(seq.stages) - 1
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0 <= v <= last:
            raise IndexOutOfRange(f"{name}={v} outside stages 0..{last}")
    if alpha > beta:
        raise IndexOutOfRange(f"alpha={alpha} must not exceed beta={beta}")
    h = identity(seq.stages[beta])
    for i in range(beta - 1, alpha - 1, -1):
        h = compose(seq.bonds[i], h)
    return h


def build_fraisse(
    start: MedianAlgebra,
    *,
    size_bound: int,
    levels: int,
    cap: int | None = None,
    order: str = "canonical",
) -> InverseSequence:
    """Iterate saturation steps from a starting algebra.

    ``levels`` counts stages including the start.  The start is
    canonicalized first, so every stage of the result is in canonical
    form.  Raises ResourceLimit, through saturation_step, as soon as any
    step would blow the stage cap.
    """
    if not isinstance(levels, int) or levels < 1:
        raise ValueError(f"levels must be a positive int, got {levels!r}")
    first, _ = canonicalize(start)
    stages = [first]
    bonds = []
    provenance: list[object] = [StartProvenance()]
    for _ in range(levels - 1):
        nxt, bond, certificate = saturation_step(
            stages[-1], size_bound=size_bound, cap=cap, order=order
        )
        stages.append(nxt)
        bonds.append(bond)
        provenance.append(
            SaturationProvenance(
                size_bound=size_bound, order=order, certificate=certificate
            )
        )
    return InverseSequence(tuple(stages), tuple(bonds), tuple(provenance))


# ---------------------------------------------------------------------------
# constrained epimorphism search


def _first_constrained_epi(source, target, cand):
    """First epimorphism (by image tuple) respecting per-position candidates.

    ``cand[pos]`` lists the allowed target positions for source position
    ``pos``, ascending.  Small sources get complete constraint propagation
    from the precomputed trigger lists; large sources get an incremental
    pairwise check with a full vectorized verification at completion, so a
    returned map is always correct and the first one in order.
    Returns a position tuple or None.
    """
    n, m = source.size, target.size
    if m > n or any(not c for c in cand):
        return None
    if n <= _GENERIC_SEARCH_MAX:
        return _constrained_small(source, target, cand)
    return _constrained_large(source, target, cand)


def _constrained_small(source, target, cand):
    from .morphisms import _triples_by_trigger

    n, m = source.size, target.size
    triples = _triples_by_trigger(source)
    tcar = target.carrier
    assign = [-1] * n
    hit = [0] * m

    def place(pos, missing):
        if pos == n:
            return tuple(assign)
        for v in cand[pos]:
            new_missing = missing - (0 if hit[v] else 1)
            if new_missing > n - pos - 1:
                continue
            assign[pos] = v
            ok = True
            for i, j, k, mm in triples[pos]:
                want = majority(tcar[assign[i]], tcar[assign[j]], tcar[assign[k]])
                if tcar[assign[mm]] != want:
                    ok = False
                    break
            if ok:
                hit[v] += 1
                found = place(pos + 1, new_missing)
                hit[v] -= 1
                if found is not None:
                    return found
            assign[pos] = -1
        return None

    return place(0, m)


def _constrained_large(source, target, cand):
    n, m = source.size, target.size
    src = np.asarray(source.carrier, dtype=np.uint64)
    tcar = target.carrier
    assign = [-1] * n
    images = np.zeros(n, dtype=np.uint64)
    hit = [0] * m

    def partial_ok(t, v):
        # check triples {i, j, t} with i < j < t whose median is already
        # assigned; medians landing above t are deferred to completion
        if t < 2:
            return True
        a = src[t]
        fa = np.uint64(tcar[v])
        pre = src[:t]
        ipre = images[:t]
        meds = (pre[:, None] & pre[None, :]) | (a & pre)[:, None] | (a & pre)[None, :]
        pos = np.searchsorted(src, meds)
        want = (
            (ipre[:, None] & ipre[None, :])
            | (fa & ipre)[:, None]
            | (fa & ipre)[None, :]
        )
        ready = pos <= t
        ext = np.append(ipre, fa)
        return bool((ext[np.where(ready, pos, 0)][ready] == want[ready]).all())

    def complete_ok():
        ia = images
        for idx in range(n):
            a, fa = src[idx], ia[idx]
            meds = (src[:, None] & src[None, :]) | (a & src)[:, None] | (a & src)[None, :]
            pos = np.searchsorted(src, meds)
            want = (ia[:, None] & ia[None, :]) | (fa & ia)[:, None] | (fa & ia)[None, :]
            if not (ia[pos] == want).all():
                return False
        return True

    def place(pos, missing):
        if pos == n:
            return tuple(assign) if complete_ok() else None
        for v in cand[pos]:
            new_missing = missing - (0 if hit[v] else 1)
            if new_missing > n - pos - 1:
                continue
            if not partial_ok(pos, v):
                continue
            assign[pos] = v
            images[pos] = tcar[v]
            hit[v] += 1
            found = place(pos + 1, new_missing)
            hit[v] -= 1
            if found is not None:
                return found
            assign[pos] = -1
        return None

    return place(0, m)


# ---------------------------------------------------------------------------
# the extension property, stagewise


@dataclass(frozen=True)
class ExtensionWitness:
    """A later stage whose projection factors through the given map."""

    beta: int
    lift: Epimorphism


@dataclass(frozen=True)
class CounterexampleReport:
    """No lift exists at any searched stage; the sequence is not saturated
    enough for this extension problem."""

    alpha: int
    betas_searched: tuple[int, ...]
    detail: str


def check_extension_property(
    seq: InverseSequence,
    f: Epimorphism,
    alpha: int,
    *,
    max_stage: int | None = None,
):
    """Look for beta > alpha and a lift g with f . g = bond composite.

    f must map some finite algebra onto stages[alpha].  The first stage
    admitting a lift wins and the lift is the first in image-tuple order.
    A CounterexampleReport only says the searched stages fail, nothing
    more; saturation may still provide a lift further out.
    """
    last = len(seq.stages) - 1
    if not 0 <= alpha <= last:
        raise IndexOutOfRange(f"alpha={alpha} outside stages 0..{last}")
    if f.target != seq.stages[alpha]:
        raise TypeMismatch("f must map onto the stage at alpha")
    if max_stage is not None:
        last = min(last, max_stage)
    fibers: dict[int, tuple[int, ...]] = {}
    for pos, v in enumerate(f.map):
        fibers.setdefault(v, ())
        fibers[v] += (pos,)
    for beta in range(alpha + 1, last + 1):
        h = composite_projection(seq, alpha, beta)
        cand = [fibers.get(v, ()) for v in h.map]
        found = _first_constrained_epi(seq.stages[beta], f.source, cand)
        if found is not None:
            lift = Epimorphism(
                seq.stages[beta], f.source, tuple(f.source.carrier[v] for v in found)
            )
            if compose(f, lift).map != h.map:
                raise InternalInvariantViolation("lift does not factor the bond")
            return ExtensionWitness(beta=beta, lift=lift)
    return CounterexampleReport(
        alpha=alpha,
        betas_searched=tuple(range(alpha + 1, last + 1)),
        detail=f"no lift of the {f.source.size}-point extension at stages "
        f"{alpha + 1}..{last}",
    )


# ---------------------------------------------------------------------------
# finitized halfspace checks


@dataclass(frozen=True)
class M1Witness:
    """A halfspace at stage beta engulfing one pulled-back family and
    missing the other; side0 is the separating set."""

    beta: int
    halfspace: Halfspace


@dataclass(frozen=True)
class M2Witness:
    """A nonempty halfspace side at stage beta inside every pulled-back
    member; side0 is the witnessing set."""

    beta: int
    halfspace: Halfspace


@dataclass(frozen=True)
class M3Witness:
    """Two disjoint convex pieces at stage beta inside the pulled-back
    halfspace, each a halfspace side of the preimage subalgebra."""

    beta: int
    piece0: ConvexSet
    piece1: ConvexSet


@dataclass(frozen=True)
class BoundedSearchReport:
    """The searched stages admit no witness.  Says nothing beyond them:
    later saturation stages may still provide one."""

    check: str
    alpha: int
    last_stage: int
    detail: str


def _resolve_family(algebra, family):
    masks = []
    for member in family:
        mask = _resolve_mask(algebra, member)
        if algebra.hull_mask(mask) != mask:
            raise NotConvex("family members must be convex")
        masks.append(mask)
    return masks


def _preimage_mask(stage, posmap, mask):
    out = 0
    for pos in range(stage.size):
        if (mask >> posmap[pos]) & 1:
            out |= 1 << pos
    return out


def check_M1(
    seq: InverseSequence,
    alpha: int,
    family_a,
    family_b,
    *,
    max_stage: int | None = None,
):
    """Separate two convex families by a halfspace at some stage >= alpha.

    Every member of the first family must be disjoint from every member of
    the second (NotDisjoint otherwise).  Families are pulled back along
    the bond composites; at each stage the candidates are the empty set,
    both sides of every halfspace in canonical order, and the full
    carrier.  The first candidate containing the whole first family while
    missing the second wins.
    """
    last = len(seq.stages) - 1
    if not 0 <= alpha <= last:
        raise IndexOutOfRange(f"alpha={alpha} outside stages 0..{last}")
    base = seq.stages[alpha]
    masks_a = _resolve_family(base, family_a)
    masks_b = _resolve_family(base, family_b)
    for ma in masks_a:
        for mb in masks_b:
            if ma & mb:
                raise NotDisjoint(
                    "the families must be disjoint across each other"
                )
    if max_stage is not None:
        last = min(last, max_stage)
    for beta in range(alpha, last + 1):
        stage = seq.stages[beta]
        posmap = composite_projection(seq, alpha, beta).position_map
        ua = 0
        for m in masks_a:
            ua |= _preimage_mask(stage, posmap, m)
        ub = 0
        for m in masks_b:
            ub |= _preimage_mask(stage, posmap, m)
        full = (1 << stage.size) - 1
        if ua == 0:
            return M1Witness(
                beta, Halfspace(stage, ConvexSet(stage, 0), ConvexSet(stage, full))
            )
        for s0, s1 in stage.wall_masks:
            for c, other in ((s0, s1), (s1, s0)):
                if ua & ~c == 0 and ub & c == 0:
                    return M1Witness(
                        beta,
                        Halfspace(stage, ConvexSet(stage, c), ConvexSet(stage, other)),
                    )
        if ub == 0:
            return M1Witness(
                beta, Halfspace(stage, ConvexSet(stage, full), ConvexSet(stage, 0))
            )
    return BoundedSearchReport(
        check="M1",
        alpha=alpha,
        last_stage=last,
        detail="no separating halfspace through the last stage",
    )


def check_M2(
    seq: InverseSequence,
    alpha: int,
    family,
    *,
    max_stage: int | None = None,
):
    """Find a nonempty halfspace side inside every member of a linked family.

    Members must be convex, nonempty and pairwise intersecting (NotLinked
    otherwise).  Candidates at each stage are both sides of every
    halfspace in canonical order, then the full carrier; the empty set is
    never a witness here.
    """
    last = len(seq.stages) - 1
    if not 0 <= alpha <= last:
        raise IndexOutOfRange(f"alpha={alpha} outside stages 0..{last}")
    base = seq.stages[alpha]
    masks = _resolve_family(base, family)
    for m in masks:
        if m == 0:
            raise NotLinked("an empty member cannot belong to a linked family")
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if not masks[i] & masks[j]:
                raise NotLinked("two family members are disjoint")
    if max_stage is not None:
        last = min(last, max_stage)
    for beta in range(alpha, last + 1):
        stage = seq.stages[beta]
        posmap = composite_projection(seq, alpha, beta).position_map
        full = (1 << stage.size) - 1
        inter = full
        for m in masks:
            inter &= _preimage_mask(stage, posmap, m)
        for s0, s1 in stage.wall_masks:
            for c, other in ((s0, s1), (s1, s0)):
                if c & ~inter == 0:
                    return M2Witness(
                        beta,
                        Halfspace(stage, ConvexSet(stage, c), ConvexSet(stage, other)),
                    )
        if inter == full:
            return M2Witness(
                beta, Halfspace(stage, ConvexSet(stage, full), ConvexSet(stage, 0))
            )
    return BoundedSearchReport(
        check="M2",
        alpha=alpha,
        last_stage=last,
        detail="no halfspace inside the intersection through the last stage",
    )


def check_M3(
    seq: InverseSequence,
    alpha: int,
    halfspace,
    *,
    max_stage: int | None = None,
):
    """Split a nonempty halfspace into two disjoint convex pieces.

    The halfspace (side0 is the set meant) is pulled back along the bond
    composites; the first stage where the preimage has at least two points
    yields the two sides of the first halfspace of the preimage
    subalgebra.  A one-point preimage at every searched stage gives a
    BoundedSearchReport.
    """
    last = len(seq.stages) - 1
    if not 0 <= alpha <= last:
        raise IndexOutOfRange(f"alpha={alpha} outside stages 0..{last}")
    base = seq.stages[alpha]
    if isinstance(halfspace, Halfspace):
        if halfspace.algebra != base:
            raise TypeMismatch("halfspace must live in the stage at alpha")
        hs = halfspace
    else:
        hs = halfspace_from_side(base, halfspace)
    if hs.side0.mask == 0:
        raise EmptySide("the halfspace side to split must be nonempty")
    if max_stage is not None:
        last = min(last, max_stage)
    for beta in range(alpha, last + 1):
        stage = seq.stages[beta]
        posmap = composite_projection(seq, alpha, beta).position_map
        pre = _preimage_mask(stage, posmap, hs.side0.mask)
        if pre.bit_count() < 2:
            continue
        positions = _mask_positions(pre)
        sub = MedianAlgebra(stage.dim, tuple(stage.carrier[k] for k in positions))
        s0, s1 = sub.wall_masks[0]
        b0 = 0
        b1 = 0
        for k, stage_pos in enumerate(positions):
            if (s0 >> k) & 1:
                b0 |= 1 << stage_pos
            else:
                b1 |= 1 << stage_pos
        if stage.size <= 64:
            for piece in (b0, b1):
                if stage.hull_mask(piece) != piece:
                    raise InternalInvariantViolation(
                        "halfspace piece of a convex preimage must stay convex"
                    )
        return M3Witness(beta, ConvexSet(stage, b0), ConvexSet(stage, b1))
    return BoundedSearchReport(
        check="M3",
        alpha=alpha,
        last_stage=last,
        detail="preimage stays a single point through the last stage",
    )


# ---------------------------------------------------------------------------
# back-and-forth interleaving


@dataclass(frozen=True)
class RoundData:
    """One completed round: forth maps stages_p[alpha] onto the previous
    q-stage, back maps stages_q[beta] onto stages_p[alpha]."""

    alpha: int
    beta: int
    forth: Epimorphism
    back: Epimorphism


@dataclass(frozen=True)
class StuckReport:
    """Where the interleaving died: which half of which round, with the
    frontier stage indices at that moment."""

    side: str
    round_index: int
    alpha: int
    beta: int
    detail: str


@dataclass(frozen=True)
class InterleavingData:
    """Outcome of interleaving two sequences.

    ``depth`` counts completed rounds.  ``stuck`` is None exactly when the
    run ended cleanly because the forth side ran out of stages.
    """

    start: Epimorphism | None
    rounds: tuple[RoundData, ...]
    stuck: StuckReport | None

    @property
    def depth(self) -> int:
        return len(self.rounds)


def _fiber_positions(epi: Epimorphism) -> dict[int, tuple[int, ...]]:
    fib: dict[int, list[int]] = {}
    for pos, v in enumerate(epi.map):
        fib.setdefault(v, []).append(pos)
    return {v: tuple(ps) for v, ps in fib.items()}


def back_and_forth(seq_p: InverseSequence, seq_q: InverseSequence) -> InterleavingData:
    """Interleave two sequences by alternating lifted epimorphisms.

    Round k first walks forward on the first sequence to the least stage
    alpha admitting a map h onto the current q-stage compatible with the
    standing back map (the forth half), then forward on the second to the
    least beta admitting a compatible map back onto stages_p[alpha] (the
    back half).  Searches take the first map in image-tuple order, so the
    whole interleaving is deterministic.  The run ends cleanly only when
    the forth side has no stages left; failing to lift while stages remain,
    or exhausting the back side, produces a StuckReport instead.
    """
    p0, q0 = seq_p.stages[0], seq_q.stages[0]
    got = _first_constrained_epi(q0, p0, [tuple(range(p0.size))] * q0.size)
    if got is None:
        return InterleavingData(
            start=None,
            rounds=(),
            stuck=StuckReport(
                side="start",
                round_index=0,
                alpha=0,
                beta=0,
                detail="no epimorphism between the bottom stages",
            ),
        )
    j_prev = Epimorphism(q0, p0, tuple(p0.carrier[v] for v in got))
    start = j_prev
    alpha_prev = beta_prev = 0
    p_last = len(seq_p.stages) - 1
    q_last = len(seq_q.stages) - 1
    rounds: list[RoundData] = []
    k = 1
    while True:
        if alpha_prev == p_last:
            return InterleavingData(start=start, rounds=tuple(rounds), stuck=None)
        fib_j = _fiber_positions(j_prev)
        forth = None
        for alpha in range(alpha_prev + 1, p_last + 1):
            h_p = composite_projection(seq_p, alpha_prev, alpha)
            cand = [fib_j.get(v, ()) for v in h_p.map]
            got = _first_constrained_epi(
                seq_p.stages[alpha], seq_q.stages[beta_prev], cand
            )
            if got is not None:
                qcar = seq_q.stages[beta_prev].carrier
                forth = (
                    alpha,
                    Epimorphism(
                        seq_p.stages[alpha],
                        seq_q.stages[beta_prev],
                        tuple(qcar[v] for v in got),
                    ),
                )
                break
        if forth is None:
            return InterleavingData(
                start=start,
                rounds=tuple(rounds),
                stuck=StuckReport(
                    side="forth",
                    round_index=k,
                    alpha=alpha_prev,
                    beta=beta_prev,
                    detail="no compatible map onto the current q-stage at any later p-stage",
                ),
            )
        alpha_k, h_k = forth
        fib_h = _fiber_positions(h_k)
        back = None
        for beta in range(beta_prev + 1, q_last + 1):
            h_q = composite_projection(seq_q, beta_prev, beta)
            cand = [fib_h.get(v, ()) for v in h_q.map]
            got = _first_constrained_epi(
                seq_q.stages[beta], seq_p.stages[alpha_k], cand
            )
            if got is not None:
                pcar = seq_p.stages[alpha_k].carrier
                back = (
                    beta,
                    Epimorphism(
                        seq_q.stages[beta],
                        seq_p.stages[alpha_k],
                        tuple(pcar[v] for v in got),
                    ),
                )
                break
        if back is None:
            return InterleavingData(
                start=start,
                rounds=tuple(rounds),
                stuck=StuckReport(
                    side="back",
                    round_index=k,
                    alpha=alpha_k,
                    beta=beta_prev,
                    detail="no compatible map back onto the reached p-stage at any later q-stage",
                ),
            )
        beta_k, j_k = back
        rounds.append(RoundData(alpha=alpha_k, beta=beta_k, forth=h_k, back=j_k))
        j_prev, alpha_prev, beta_prev = j_k, alpha_k, beta_k
        k += 1
