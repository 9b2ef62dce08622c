"""Serialization and the command line front end.

File formats are plain JSON with a schema_version field.  Points are
always written as bitstrings (coordinate 0 leftmost) so the files stay
readable next to the math.  Graph exports render the covering graph
(pairs whose interval has exactly two points); sequence reports write a
stages.csv table with a growth figure next to it.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx

from .errors import (
    AxiomViolation,
    BoundExceeded,
    EmptyCarrier,
    EmptySide,
    GroundSizeTooLarge,
    IndexOutOfRange,
    MedianFraisseError,
    NotConvex,
    NotCovering,
    NotDisjoint,
    NotLinked,
    NotMedianClosed,
    NotMedianPreserving,
    NotSurjective,
    ParseError,
    PointNotInCarrier,
    ResourceLimit,
    TypeMismatch,
)
from .median_core import (
    MaximalLinkedSystem,
    MedianAlgebra,
    canonicalize,
    halfspaces,
    point_to_str,
    superextension,
    validate,
)
from .morphisms import Epimorphism, check_epimorphism, find_isomorphism
from .fraisse_engine import (
    BoundedSearchReport,
    CounterexampleReport,
    InverseSequence,
    SaturationProvenance,
    SplitData,
    SplitProvenance,
    StartProvenance,
    back_and_forth,
    build_fraisse,
    check_extension_property,
    check_M1,
    check_M2,
    check_M3,
)

SCHEMA_VERSION = 1

_FIG_METADATA = {"Software": "median-fraisse"}

# bonds of loaded sequences are re-verified up to this size; beyond it the
# cubic check would dominate load time and the file is trusted
_LOAD_CHECK_MAX = 512


@dataclass(frozen=True)
class RunConfig:
    """Knobs of a sequence-building run, as one value."""

    size_bound: int = 2
    levels: int = 4
    stage_point_cap: int | None = None
    enumeration_order: str = "canonical"
    output_dir: str = "."
    format: str = "json"


# ---------------------------------------------------------------------------
# JSON


def dump_json_file(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json_file(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _expect(obj, key, types, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    v = obj[key]
    if not isinstance(v, types):
        raise ParseError(f"{where}: field {key!r} has the wrong type")
    return v


def _check_version(obj, where):
    v = _expect(obj, "schema_version", int, where)
    if v != SCHEMA_VERSION:
        raise ParseError(f"{where}: unsupported schema_version {v}")


def algebra_to_json(algebra: MedianAlgebra) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": algebra.dim,
        "points": algebra.point_strs(),
        "canonical": algebra.canonical,
    }


def algebra_from_json(obj, where: str = "algebra") -> MedianAlgebra:
    _check_version(obj, where)
    dim = _expect(obj, "dim", int, where)
    points = _expect(obj, "points", list, where)
    algebra = validate(points, dim)
    if obj.get("canonical", False):
        canon, _ = canonicalize(algebra)
        if (canon.dim, canon.carrier) != (algebra.dim, algebra.carrier):
            raise ParseError(f"{where}: claims canonical form but is not canonical")
        return canon
    return algebra


def mls_to_json(system: MaximalLinkedSystem) -> dict:
    g = system.ground_size
    return {
        "schema_version": SCHEMA_VERSION,
        "ground": g,
        "family": [
            "".join("1" if (m >> e) & 1 else "0" for e in range(g))
            for m in system.family
        ],
    }


def mls_from_json(obj, where: str = "system") -> MaximalLinkedSystem:
    _check_version(obj, where)
    g = _expect(obj, "ground", int, where)
    fam = _expect(obj, "family", list, where)
    masks = []
    for s in fam:
        if not isinstance(s, str) or len(s) != g or set(s) - {"0", "1"}:
            raise ParseError(f"{where}: bad subset string {s!r}")
        masks.append(sum(1 << e for e, ch in enumerate(s) if ch == "1"))
    return MaximalLinkedSystem(g, tuple(sorted(masks)))


def morphism_to_json(epi: Epimorphism) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "source": algebra_to_json(epi.source),
        "target": algebra_to_json(epi.target),
        "map": epi.map_strs(),
    }


def morphism_from_json(obj, *, stages=None, where: str = "morphism") -> Epimorphism:
    """Load a map; targets may name a sequence stage as {"stage": i}."""
    _check_version(obj, where)

    def load_end(key):
        end = _expect(obj, key, dict, where)
        if "stage" in end:
            if stages is None:
                raise ParseError(f"{where}: stage reference without a sequence")
            i = end["stage"]
            if not isinstance(i, int) or not 0 <= i < len(stages):
                raise ParseError(f"{where}: stage reference {i!r} out of range")
            return stages[i]
        return algebra_from_json(end, f"{where}.{key}")

    source = load_end("source")
    target = load_end("target")
    raw_map = _expect(obj, "map", list, where)
    if len(raw_map) != source.size:
        raise ParseError(f"{where}: map length does not match the source carrier")
    try:
        pts = tuple(target.point(s) for s in raw_map)
    except (ParseError, PointNotInCarrier) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    epi = Epimorphism(source, target, pts)
    check_epimorphism(epi, max_size=None)
    return epi


def _provenance_to_json(record) -> dict:
    if isinstance(record, StartProvenance):
        return {"kind": "start"}
    if isinstance(record, SaturationProvenance):
        return {
            "kind": "saturation",
            "size_bound": record.size_bound,
            "order": record.order,
            "has_certificate": record.certificate is not None,
        }
    if isinstance(record, SplitProvenance):
        return {
            "kind": "split",
            "A": record.split.A.point_strs(),
            "B": record.split.B.point_strs(),
        }
    raise TypeMismatch(f"unknown provenance record {type(record).__name__}")


def sequence_to_json(seq: InverseSequence) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "stages": [algebra_to_json(s) for s in seq.stages],
        "bonds": [b.map_strs() for b in seq.bonds],
        "provenance": [_provenance_to_json(p) for p in seq.provenance],
    }


def sequence_from_json(obj, where: str = "sequence") -> InverseSequence:
    """Rebuild a sequence; certificates are not reloaded from this file.

    Bonds of moderate size are re-verified; huge stages are trusted as
    written (the full check is cubic).
    """
    _check_version(obj, where)
    stage_objs = _expect(obj, "stages", list, where)
    stages = tuple(
        algebra_from_json(s, f"{where}.stages[{i}]") for i, s in enumerate(stage_objs)
    )
    bond_objs = _expect(obj, "bonds", list, where)
    if len(bond_objs) != max(len(stages) - 1, 0):
        raise ParseError(f"{where}: expected {len(stages) - 1} bonds")
    bonds = []
    for i, raw in enumerate(bond_objs):
        if not isinstance(raw, list) or len(raw) != stages[i + 1].size:
            raise ParseError(f"{where}: bond {i} has the wrong length")
        try:
            pts = tuple(stages[i].point(s) for s in raw)
        except (ParseError, PointNotInCarrier) as exc:
            raise ParseError(f"{where}: bond {i}: {exc}") from exc
        epi = Epimorphism(stages[i + 1], stages[i], pts)
        if stages[i + 1].size <= _LOAD_CHECK_MAX:
            check_epimorphism(epi, max_size=None)
        bonds.append(epi)
    prov_objs = _expect(obj, "provenance", list, where)
    if len(prov_objs) != len(stages):
        raise ParseError(f"{where}: expected one provenance record per stage")
    provenance = []
    for i, p in enumerate(prov_objs):
        kind = _expect(p, "kind", str, f"{where}.provenance[{i}]")
        if kind == "start":
            provenance.append(StartProvenance())
        elif kind == "saturation":
            provenance.append(
                SaturationProvenance(
                    size_bound=_expect(p, "size_bound", int, where),
                    order=_expect(p, "order", str, where),
                    certificate=None,
                )
            )
        elif kind == "split":
            if i == 0:
                raise ParseError(f"{where}: stage 0 cannot be a split")
            base = stages[i - 1]
            from .median_core import convex_set

            provenance.append(
                SplitProvenance(
                    SplitData(
                        base,
                        convex_set(base, p.get("A", [])),
                        convex_set(base, p.get("B", [])),
                    )
                )
            )
        else:
            raise ParseError(f"{where}: unknown provenance kind {kind!r}")
    return InverseSequence(stages, tuple(bonds), tuple(provenance))


def certificates_to_json(seq: InverseSequence) -> dict:
    per_stage = {}
    for i, record in enumerate(seq.provenance):
        if isinstance(record, SaturationProvenance) and record.certificate:
            per_stage[str(i)] = [
                {
                    "image": algebra_to_json(e.image),
                    "extender": algebra_to_json(e.extender),
                    "stage_map": e.stage_map.map_strs(),
                    "extender_map": e.extender_map.map_strs(),
                    "witness": e.witness.map_strs(),
                }
                for e in record.certificate
            ]
    return {"schema_version": SCHEMA_VERSION, "stages": per_stage}


def save_sequence(seq: InverseSequence, out_dir: str | Path, name: str = "sequence"):
    """Write sequence JSON (and certificates, when present) into a directory.

    Returns the list of written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    seq_path = out / f"{name}.json"
    dump_json_file(sequence_to_json(seq), seq_path)
    written.append(seq_path)
    certs = certificates_to_json(seq)
    if certs["stages"]:
        cert_path = out / f"{name}.certificates.json"
        dump_json_file(certs, cert_path)
        written.append(cert_path)
    return written


def load_sequence(path: str | Path) -> InverseSequence:
    return sequence_from_json(load_json_file(path), where=str(path))


# ---------------------------------------------------------------------------
# graph and figure exports


def _covering_edges(algebra: MedianAlgebra):
    n = algebra.size
    for i in range(n):
        for j in range(i + 1, n):
            if algebra.interval_mask(i, j).bit_count() == 2:
                yield i, j


def algebra_to_dot(algebra: MedianAlgebra) -> str:
    labels = algebra.point_strs()
    lines = ["graph median {", "  node [shape=box];"]
    for s in labels:
        lines.append(f'  "{s}";')
    for i, j in _covering_edges(algebra):
        lines.append(f'  "{labels[i]}" -- "{labels[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def algebra_figure(algebra: MedianAlgebra, path: str | Path) -> None:
    """Render the covering graph to a PNG file.

    Layout is seeded and metadata pinned, so the same input produces the
    same bytes under the same library versions.
    """
    labels = algebra.point_strs()
    g = nx.Graph()
    g.add_nodes_from(labels)
    for i, j in _covering_edges(algebra):
        g.add_edge(labels[i], labels[j])
    pos = nx.spring_layout(g, seed=0)
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    nx.draw_networkx(
        g,
        pos=pos,
        ax=ax,
        node_color="#d9d9d9",
        edgecolors="#555555",
        node_size=500,
        font_size=7,
    )
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_FIG_METADATA)
    plt.close(fig)


def sequence_csv(seq: InverseSequence, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "points", "dim", "walls"])
        for i, s in enumerate(seq.stages):
            writer.writerow([i, s.size, s.dim, len(s.wall_masks)])


def growth_figure(seq: InverseSequence, path: str | Path) -> None:
    sizes = [s.size for s in seq.stages]
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(range(len(sizes)), sizes, marker="o", color="#336699")
    ax.set_xlabel("stage")
    ax.set_ylabel("points")
    ax.set_xticks(range(len(sizes)))
    if max(sizes) > 16 * max(1, min(sizes)):
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_FIG_METADATA)
    plt.close(fig)


# ---------------------------------------------------------------------------
# commands


def _emit(args, text: str, payload: dict) -> None:
    if getattr(args, "json_report", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_validate(args) -> int:
    obj = load_json_file(args.file)
    _check_version(obj, str(args.file))
    dim = _expect(obj, "dim", int, str(args.file))
    points = _expect(obj, "points", list, str(args.file))
    try:
        algebra = validate(points, dim)
    except NotMedianClosed as exc:
        witness = [point_to_str(p, dim) for p in exc.witness]
        _emit(
            args,
            f"invalid: majority of ({', '.join(witness)}) is "
            f"{point_to_str(exc.missing, dim)}, which is missing",
            {
                "valid": False,
                "witness": witness,
                "missing": point_to_str(exc.missing, dim),
            },
        )
        return 1
    _emit(
        args,
        f"valid: {algebra.size} points, dim {algebra.dim}, "
        f"{len(algebra.wall_masks)} walls",
        {
            "valid": True,
            "points": algebra.size,
            "dim": algebra.dim,
            "walls": len(algebra.wall_masks),
        },
    )
    return 0


def cmd_lambda(args) -> int:
    algebra, systems = superextension(args.n)
    text = (
        f"superextension of a {args.n}-set: {algebra.size} points, "
        f"dim {algebra.dim}, {len(algebra.wall_masks)} walls"
    )
    payload = {
        "ground": args.n,
        "points": algebra.size,
        "dim": algebra.dim,
        "walls": len(algebra.wall_masks),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        apath = out / f"lambda_{args.n}.json"
        dump_json_file(algebra_to_json(algebra), apath)
        spath = out / f"lambda_{args.n}_systems.json"
        dump_json_file(
            {
                "schema_version": SCHEMA_VERSION,
                "systems": [mls_to_json(s) for s in systems],
            },
            spath,
        )
        files = [str(apath), str(spath)]
        if args.format == "dot":
            p = out / f"lambda_{args.n}.dot"
            p.write_text(algebra_to_dot(algebra))
            files.append(str(p))
        elif args.format == "png":
            p = out / f"lambda_{args.n}.png"
            algebra_figure(algebra, p)
            files.append(str(p))
        payload["files"] = files
        text += "\n" + "\n".join(f"wrote {f}" for f in files)
    _emit(args, text, payload)
    return 0


def cmd_fraisse(args) -> int:
    config = RunConfig(
        size_bound=args.bound,
        levels=args.levels,
        stage_point_cap=args.cap,
        enumeration_order=args.order,
        output_dir=args.out,
        format=args.format,
    )
    if args.start:
        start = algebra_from_json(load_json_file(args.start), str(args.start))
    else:
        start = MedianAlgebra(0, (0,))
    seq = build_fraisse(
        start,
        size_bound=config.size_bound,
        levels=config.levels,
        cap=config.stage_point_cap,
        order=config.enumeration_order,
    )
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [str(p) for p in save_sequence(seq, out)]
    csv_path = out / "stages.csv"
    sequence_csv(seq, csv_path)
    written.append(str(csv_path))
    png_path = out / "growth.png"
    growth_figure(seq, png_path)
    written.append(str(png_path))
    sizes = [s.size for s in seq.stages]
    text = "stage sizes: " + " ".join(str(v) for v in sizes)
    text += "\n" + "\n".join(f"wrote {f}" for f in written)
    _emit(args, text, {"sizes": sizes, "files": written})
    return 0


def _parse_family(algebra: MedianAlgebra, text: str):
    groups = []
    if text:
        for part in text.split(";"):
            groups.append([s for s in part.split(",") if s])
    return [
        [algebra.point(s) for s in group] for group in groups
    ]


def _halfspace_payload(h) -> dict:
    return {
        "side0": h.side0.point_strs(),
        "side1": h.side1.point_strs(),
    }


def cmd_check(args) -> int:
    seq = load_sequence(args.seq)
    if args.what == "baf":
        other = load_sequence(args.seq2)
        data = back_and_forth(seq, other)
        payload = {
            "depth": data.depth,
            "rounds": [
                {"alpha": r.alpha, "beta": r.beta} for r in data.rounds
            ],
        }
        if data.stuck is None:
            _emit(args, f"clean stop after {data.depth} rounds", payload)
            return 0
        payload["stuck"] = {
            "side": data.stuck.side,
            "round": data.stuck.round_index,
            "alpha": data.stuck.alpha,
            "beta": data.stuck.beta,
            "detail": data.stuck.detail,
        }
        _emit(
            args,
            f"stuck in the {data.stuck.side} half of round "
            f"{data.stuck.round_index} after {data.depth} completed rounds: "
            f"{data.stuck.detail}",
            payload,
        )
        return 1

    alpha = args.alpha
    stage = None
    if not 0 <= alpha < len(seq.stages):
        raise IndexOutOfRange(
            f"alpha={alpha} outside stages 0..{len(seq.stages) - 1}"
        )
    stage = seq.stages[alpha]

    if args.what == "m1":
        fam_a = _parse_family(stage, args.family_a or "")
        fam_b = _parse_family(stage, args.family_b or "")
        res = check_M1(seq, alpha, fam_a, fam_b, max_stage=args.max_stage)
        if isinstance(res, BoundedSearchReport):
            _emit(args, f"no witness: {res.detail}", {"witness": None, "detail": res.detail})
            return 1
        payload = {"beta": res.beta, **_halfspace_payload(res.halfspace)}
        _emit(
            args,
            f"witness at stage {res.beta}: side0 = "
            f"{{{','.join(res.halfspace.side0.point_strs())}}}",
            payload,
        )
        return 0

    if args.what == "m2":
        fam = _parse_family(stage, args.family or "")
        res = check_M2(seq, alpha, fam, max_stage=args.max_stage)
        if isinstance(res, BoundedSearchReport):
            _emit(args, f"no witness: {res.detail}", {"witness": None, "detail": res.detail})
            return 1
        payload = {"beta": res.beta, **_halfspace_payload(res.halfspace)}
        _emit(
            args,
            f"witness at stage {res.beta}: side0 = "
            f"{{{','.join(res.halfspace.side0.point_strs())}}}",
            payload,
        )
        return 0

    if args.what == "m3":
        side = [s for s in (args.side or "").split(",") if s]
        res = check_M3(seq, alpha, side, max_stage=args.max_stage)
        if isinstance(res, BoundedSearchReport):
            _emit(args, f"no witness: {res.detail}", {"witness": None, "detail": res.detail})
            return 1
        payload = {
            "beta": res.beta,
            "piece0": res.piece0.point_strs(),
            "piece1": res.piece1.point_strs(),
        }
        _emit(
            args,
            f"witness at stage {res.beta}: pieces "
            f"{{{','.join(res.piece0.point_strs())}}} and "
            f"{{{','.join(res.piece1.point_strs())}}}",
            payload,
        )
        return 0

    if args.what == "ext":
        f = morphism_from_json(
            load_json_file(args.map), stages=seq.stages, where=str(args.map)
        )
        res = check_extension_property(seq, f, alpha, max_stage=args.max_stage)
        if isinstance(res, CounterexampleReport):
            _emit(
                args,
                f"no lift at stages {list(res.betas_searched)}: {res.detail}",
                {"witness": None, "betas_searched": list(res.betas_searched)},
            )
            return 1
        _emit(
            args,
            f"lift found at stage {res.beta}",
            {"beta": res.beta, "lift": res.lift.map_strs()},
        )
        return 0

    raise ParseError(f"unknown check {args.what!r}")


def cmd_export(args) -> int:
    obj = load_json_file(args.file)
    _check_version(obj, str(args.file))
    out = Path(args.out)
    if "stages" in obj:
        seq = sequence_from_json(obj, str(args.file))
        if args.format == "csv":
            sequence_csv(seq, out)
        elif args.format == "png":
            growth_figure(seq, out)
        elif args.format == "json":
            dump_json_file(sequence_to_json(seq), out)
        else:
            raise ParseError(f"format {args.format!r} does not apply to sequences")
    else:
        algebra = algebra_from_json(obj, str(args.file))
        if args.format == "dot":
            out.write_text(algebra_to_dot(algebra))
        elif args.format == "png":
            algebra_figure(algebra, out)
        elif args.format == "json":
            dump_json_file(algebra_to_json(algebra), out)
        else:
            raise ParseError(f"format {args.format!r} does not apply to algebras")
    print(f"wrote {out}")
    return 0


def cmd_iso(args) -> int:
    a = algebra_from_json(load_json_file(args.file_a), str(args.file_a))
    b = algebra_from_json(load_json_file(args.file_b), str(args.file_b))
    epi = find_isomorphism(a, b)
    if epi is None:
        _emit(args, "not isomorphic", {"isomorphic": False})
        return 1
    pairs = [
        f"{point_to_str(p, a.dim)} -> {point_to_str(epi.map[k], b.dim)}"
        for k, p in enumerate(a.carrier)
    ]
    _emit(
        args,
        "isomorphic:\n" + "\n".join(pairs),
        {"isomorphic": True, "map": epi.map_strs()},
    )
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="median-fraisse",
        description="finite median algebras, saturation sequences, halfspace checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an algebra file for median closure")
    p.add_argument("file")
    p.add_argument("--json-report", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lambda", help="superextension of an n-element set")
    p.add_argument("n", type=int)
    p.add_argument("--out", help="directory for the algebra and system files")
    p.add_argument("--format", choices=["json", "dot", "png"], default="json")
    p.add_argument("--json-report", action="store_true")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("fraisse", help="build a saturation sequence")
    p.add_argument("--start", help="algebra file to start from (default: one point)")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--order", choices=["canonical", "reversed"], default="canonical")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--json-report", action="store_true")
    p.set_defaults(func=cmd_fraisse)

    p = sub.add_parser("check", help="run a finitized check against a sequence")
    p.add_argument("what", choices=["m1", "m2", "m3", "ext", "baf"])
    p.add_argument("--seq", required=True)
    p.add_argument("--seq2", help="second sequence (baf)")
    p.add_argument("--alpha", type=int, default=0)
    p.add_argument("--family-a", help="m1: sets as comma lists joined by ';'")
    p.add_argument("--family-b", help="m1: second family")
    p.add_argument("--family", help="m2: linked family")
    p.add_argument("--side", help="m3: halfspace side as a comma list")
    p.add_argument("--map", help="ext: morphism file onto the stage at alpha")
    p.add_argument("--max-stage", type=int, default=None)
    p.add_argument("--json-report", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="convert a file to dot/png/csv/json")
    p.add_argument("file")
    p.add_argument("--format", choices=["dot", "png", "csv", "json"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("iso", help="search for an isomorphism between two algebras")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--json-report", action="store_true")
    p.set_defaults(func=cmd_iso)

    return parser


_USAGE_ERRORS = (
    ParseError,
    TypeMismatch,
    NotDisjoint,
    NotLinked,
    NotConvex,
    NotCovering,
    EmptySide,
    EmptyCarrier,
    PointNotInCarrier,
    IndexOutOfRange,
    AxiomViolation,
    NotSurjective,
    NotMedianPreserving,
    NotMedianClosed,
)

_RESOURCE_ERRORS = (ResourceLimit, BoundExceeded, GroundSizeTooLarge)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _RESOURCE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
