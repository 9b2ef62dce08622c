"""Splits, covers, the isomorphism-class corpus, saturation steps and
sequences, finitized halfspace checks, and back-and-forth interleaving."""

import itertools
from collections import Counter

import pytest

import median_fraisse as mf
from median_fraisse import (
    BoundExceeded,
    BoundedSearchReport,
    CounterexampleReport,
    EmptySide,
    ExtensionWitness,
    M1Witness,
    M2Witness,
    M3Witness,
    NotConvex,
    NotCovering,
    NotDisjoint,
    NotLinked,
    ResourceLimit,
    SplitData,
    StuckReport,
    TypeMismatch,
)


# ---------------------------------------------------------------------------
# split extensions


def test_split_extension_worked_example(two_point):
    a = mf.convex_set(two_point, ["0"])
    b = mf.convex_set(two_point, ["0", "1"])
    ext, proj = mf.split_extension(SplitData(two_point, a, b))
    assert ext.point_strs() == ["00", "01", "11"]
    assert [mf.point_to_str(p, 1) for p in proj.map] == ["0", "0", "1"]


def test_split_extension_fiber_law(square):
    a = mf.convex_set(square, ["00", "01"])
    b = mf.convex_set(square, ["00", "01", "10", "11"])
    ext, proj = mf.split_extension(SplitData(square, a, b))
    fibers = Counter(proj.map)
    for pos, p in enumerate(square.carrier):
        expected = 2 if (a.mask >> pos) & 1 else 1
        assert fibers[p] == expected


def test_split_data_validation(square, two_point):
    full = mf.convex_set(square, square.point_strs())
    with pytest.raises(EmptySide):
        SplitData(square, mf.ConvexSet(square, 0), full)
    with pytest.raises(NotConvex):
        SplitData(square, mf.ConvexSet(square, 0b1001), full)
    with pytest.raises(NotCovering):
        SplitData(
            square,
            mf.convex_set(square, ["00"]),
            mf.convex_set(square, ["01"]),
        )
    with pytest.raises(TypeMismatch):
        SplitData(square, mf.convex_set(two_point, ["0"]), full)


# ---------------------------------------------------------------------------
# convex covers


def test_covers_of_edge(two_point):
    covers = mf.enumerate_convex_covers(two_point)
    shapes = [(a.point_strs(), b.point_strs()) for a, b in covers]
    assert shapes == [
        (["0"], ["1"]),
        (["0"], ["0", "1"]),
        (["1"], ["0", "1"]),
        (["0", "1"], ["0", "1"]),
    ]


def test_covers_respect_total_budget(two_point):
    covers = mf.enumerate_convex_covers(two_point, max_total=2)
    assert [(a.point_strs(), b.point_strs()) for a, b in covers] == [
        (["0"], ["1"])
    ]
    assert mf.enumerate_convex_covers(two_point, max_total=1) == []


# ---------------------------------------------------------------------------
# the corpus


def test_corpus_counts_up_to_eight():
    per = Counter(a.size for a in mf.enumerate_algebras(8))
    assert [per.get(k, 0) for k in range(1, 9)] == [1, 1, 1, 3, 4, 11, 23, 69]


def test_corpus_members_are_canonical_and_distinct():
    corpus = mf.enumerate_algebras(6)
    forms = {(a.dim, a.carrier) for a in corpus}
    assert len(forms) == len(corpus)
    for a in corpus:
        assert a.canonical
        form, _ = mf.canonicalize(a)
        assert (form.dim, form.carrier) == (a.dim, a.carrier)


def test_corpus_counts_match_subset_oracle():
    """Independent recount for sizes up to 5: enumerate median-closed
    subsets of the 4-cube directly and deduplicate up to isomorphism."""

    def closed(points):
        s = set(points)
        return all(
            mf.majority(a, b, c) in s
            for a, b, c in itertools.combinations(points, 3)
        )

    reps = []
    per = Counter()
    for k in range(1, 6):
        for sub in itertools.combinations(range(16), k):
            if not closed(sub):
                continue
            alg = mf.validate([format(p, "04b") for p in sub], 4)
            if any(
                r.size == k and mf.find_isomorphism(alg, r) is not None
                for r in reps
            ):
                continue
            reps.append(alg)
            per[k] += 1
    assert [per.get(k, 0) for k in range(1, 6)] == [1, 1, 1, 3, 4]

    engine = Counter(a.size for a in mf.enumerate_algebras(5))
    assert engine == per


def test_corpus_argument_validation():
    with pytest.raises(ValueError):
        mf.enumerate_algebras(0)
    with pytest.raises(BoundExceeded):
        mf.enumerate_algebras(13)


# ---------------------------------------------------------------------------
# saturation steps


def test_saturation_step_on_edge(two_point):
    ext, bond, cert = mf.saturation_step(two_point, size_bound=3)
    assert ext.size == 24 and ext.dim == 6
    assert len(cert) == 4
    for entry in cert:
        # the square p . bond = f . witness commutes for every recorded tuple
        left = mf.compose(entry.stage_map, bond)
        right = mf.compose(entry.extender_map, entry.witness)
        assert left.map == right.map
        mf.check_epimorphism(entry.witness, max_size=None)


def test_saturation_step_order_variants_are_isomorphic(two_point):
    ext_c, _, cert_c = mf.saturation_step(two_point, size_bound=3)
    ext_r, _, cert_r = mf.saturation_step(two_point, size_bound=3, order="reversed")
    assert (ext_c.size, len(cert_c)) == (ext_r.size, len(cert_r)) == (24, 4)
    assert mf.find_isomorphism(ext_c, ext_r, max_size=None) is not None


def test_saturation_step_validation(one_point):
    with pytest.raises(BoundExceeded):
        mf.saturation_step(one_point, size_bound=9)
    with pytest.raises(ValueError):
        mf.saturation_step(one_point, size_bound=2, order="sideways")


def test_saturation_resolves_covers_of_the_base(two_point):
    """Finite version of the halfspace characterization on one step: every
    convex cover of the base is realized by a halfspace of the extension,
    up to swapping the two sides."""
    ext, bond, _ = mf.saturation_step(two_point, size_bound=3)
    for E, F in mf.enumerate_convex_covers(two_point):
        hit = False
        for H in mf.halfspaces(ext):
            img0 = {bond.map[k] for k in H.side0.members}
            img1 = {bond.map[k] for k in H.side1.members}
            want = (set(E.points), set(F.points))
            if (img0, img1) == want or (img1, img0) == want:
                hit = True
                break
        assert hit, (E.point_strs(), F.point_strs())


# ---------------------------------------------------------------------------
# sequences


def test_build_fraisse_bound_two(seq_bound2):
    assert [a.size for a in seq_bound2.stages] == [1, 2, 4, 8]
    assert [a.dim for a in seq_bound2.stages] == [0, 1, 2, 3]
    kinds = [type(p).__name__ for p in seq_bound2.provenance]
    assert kinds == [
        "StartProvenance",
        "SaturationProvenance",
        "SaturationProvenance",
        "SaturationProvenance",
    ]
    for bond in seq_bound2.bonds:
        mf.check_epimorphism(bond, max_size=None)


def test_build_fraisse_bound_three(seq_bound3):
    assert [a.size for a in seq_bound3.stages] == [1, 6, 288]


def test_build_fraisse_validation(one_point):
    with pytest.raises(ValueError):
        mf.build_fraisse(one_point, size_bound=2, levels=0)


def test_stage_cap_observed(one_point):
    with pytest.raises(ResourceLimit):
        mf.build_fraisse(one_point, size_bound=2, levels=3, cap=3)


def test_stage_cap_env_override(one_point, monkeypatch):
    monkeypatch.setenv("MEDIAN_FRAISSE_CAP", "3")
    with pytest.raises(ResourceLimit):
        mf.build_fraisse(one_point, size_bound=2, levels=3)


def test_composite_projection(seq_bound2):
    ident = mf.composite_projection(seq_bound2, 2, 2)
    assert ident.map == seq_bound2.stages[2].carrier
    direct = mf.composite_projection(seq_bound2, 0, 3)
    step = mf.compose(
        seq_bound2.bonds[0],
        mf.compose(seq_bound2.bonds[1], seq_bound2.bonds[2]),
    )
    assert direct.map == step.map
    with pytest.raises(mf.IndexOutOfRange):
        mf.composite_projection(seq_bound2, 2, 1)
    with pytest.raises(mf.IndexOutOfRange):
        mf.composite_projection(seq_bound2, 0, 9)


# ---------------------------------------------------------------------------
# extension property


def test_extension_property_witness(seq_bound2, one_point, two_point):
    f = mf.enumerate_epis(two_point, one_point)[0]
    w = mf.check_extension_property(seq_bound2, f, 0)
    assert isinstance(w, ExtensionWitness)
    assert w.beta == 1
    assert mf.compose(f, w.lift).map == mf.composite_projection(
        seq_bound2, 0, w.beta
    ).map


def test_extension_property_counterexample(seq_bound2, one_point, three_chain):
    # no stage of the bound-2 sequence maps onto a 3-chain
    f = mf.enumerate_epis(three_chain, one_point)[0]
    c = mf.check_extension_property(seq_bound2, f, 0)
    assert isinstance(c, CounterexampleReport)
    assert c.alpha == 0
    assert c.betas_searched == (1, 2, 3)


# ---------------------------------------------------------------------------
# finitized halfspace checks


def test_m1_witness_same_stage(seq_bound2):
    r = mf.check_M1(seq_bound2, 2, [["00", "01"]], [["10", "11"]])
    assert isinstance(r, M1Witness)
    assert r.beta == 2
    assert r.halfspace.side0.point_strs() == ["00", "01"]
    assert r.halfspace.side1.point_strs() == ["10", "11"]


def test_m1_witness_stage_one(seq_bound2):
    r = mf.check_M1(seq_bound2, 1, [["0"]], [["1"]])
    assert isinstance(r, M1Witness)
    assert r.beta == 1
    assert r.halfspace.side0.point_strs() == ["0"]


def test_m1_requires_cross_disjointness(seq_bound2):
    with pytest.raises(NotDisjoint):
        mf.check_M1(seq_bound2, 2, [["00"]], [["00", "01"]])


def test_m2_witness(seq_bound2):
    r = mf.check_M2(seq_bound2, 2, [["00", "01"]])
    assert isinstance(r, M2Witness)
    assert r.beta == 2
    assert r.halfspace.side0.point_strs() == ["00", "01"]


def test_m2_bounded_report_on_edge_intersection(seq_bound2):
    # the two edges meet in a corner; its preimages stay two-point edges in
    # every later cube, and an edge never contains a full halfspace side
    r = mf.check_M2(seq_bound2, 2, [["00", "01"], ["00", "10"]])
    assert isinstance(r, BoundedSearchReport)
    assert r.check == "M2"
    assert r.alpha == 2
    assert r.last_stage == 3


def test_m2_requires_linked_family(seq_bound2):
    with pytest.raises(NotLinked):
        mf.check_M2(seq_bound2, 2, [["00", "01"], ["10", "11"]])


def test_m3_splits_a_side(seq_bound2):
    r = mf.check_M3(seq_bound2, 2, ["00", "01"])
    assert isinstance(r, M3Witness)
    assert r.beta == 2
    assert r.piece0.point_strs() == ["00"]
    assert r.piece1.point_strs() == ["01"]


def test_m3_needs_a_later_stage_for_singletons(seq_bound2):
    r = mf.check_M3(seq_bound2, 1, ["0"])
    assert isinstance(r, M3Witness)
    assert r.beta == 2
    assert r.piece0.point_strs() == ["00"]
    assert r.piece1.point_strs() == ["01"]


def test_m3_rejects_empty_side(seq_bound2):
    with pytest.raises(EmptySide):
        mf.check_M3(seq_bound2, 2, [])


# ---------------------------------------------------------------------------
# back-and-forth


def test_self_interleaving_reaches_full_depth(seq_bound2):
    inter = mf.back_and_forth(seq_bound2, seq_bound2)
    assert inter.stuck is None
    assert inter.depth == 3
    # both triangles commute pointwise at every round
    prev_alpha = prev_beta = 0
    prev_back = inter.start
    for round_ in inter.rounds:
        mf.check_epimorphism(round_.forth, max_size=None)
        mf.check_epimorphism(round_.back, max_size=None)
        forth_tri = mf.compose(prev_back, round_.forth)
        assert forth_tri.map == mf.composite_projection(
            seq_bound2, prev_alpha, round_.alpha
        ).map
        back_tri = mf.compose(round_.forth, round_.back)
        assert back_tri.map == mf.composite_projection(
            seq_bound2, prev_beta, round_.beta
        ).map
        prev_alpha, prev_beta, prev_back = round_.alpha, round_.beta, round_.back


def test_interleaving_against_larger_bound_gets_stuck(seq_bound2, seq_bound3):
    inter = mf.back_and_forth(seq_bound2, seq_bound3)
    assert inter.depth == 1
    assert isinstance(inter.stuck, StuckReport)
    assert inter.stuck.side == "forth"
    assert (inter.stuck.round_index, inter.stuck.alpha, inter.stuck.beta) == (2, 1, 1)


def test_interleaving_reverse_direction_gets_stuck(seq_bound2, seq_bound3):
    inter = mf.back_and_forth(seq_bound3, seq_bound2)
    assert inter.depth == 0
    assert isinstance(inter.stuck, StuckReport)
    assert inter.stuck.side == "back"
    assert (inter.stuck.round_index, inter.stuck.alpha, inter.stuck.beta) == (1, 1, 0)
