"""Serialization round trips and the command-line surface.

Most CLI cases call main() in-process for speed; one subprocess run checks
the installed console script end to end.
"""

import json
import subprocess
import sys

import pytest

import median_fraisse as mf
from median_fraisse import ParseError, cli_io
from median_fraisse.cli_io import dump_json_file, load_json_file, main


@pytest.fixture()
def square_file(tmp_path, square):
    path = tmp_path / "square.json"
    dump_json_file(mf.algebra_to_json(square), path)
    return path


@pytest.fixture()
def seq2_dir(tmp_path, seq_bound2):
    out = tmp_path / "seq2"
    out.mkdir()
    mf.save_sequence(seq_bound2, out)
    return out


# ---------------------------------------------------------------------------
# JSON round trips


def test_algebra_round_trip(square):
    obj = mf.algebra_to_json(square)
    assert obj["schema_version"] == 1
    assert obj["points"] == ["00", "01", "10", "11"]
    back = mf.algebra_from_json(obj)
    assert back.dim == square.dim and back.carrier == square.carrier


def test_algebra_json_verifies_canonical_claim():
    # duplicate and constant coordinates keep this away from canonical form
    padded = mf.validate(["000", "110"], 3)
    obj = mf.algebra_to_json(padded)
    obj["canonical"] = True
    with pytest.raises(ParseError):
        mf.algebra_from_json(obj)


def test_algebra_json_rejects_bad_schema(square):
    obj = mf.algebra_to_json(square)
    obj["schema_version"] = 99
    with pytest.raises(ParseError):
        mf.algebra_from_json(obj)


def test_mls_round_trip():
    _, systems = mf.superextension(3)
    for s in systems:
        back = mf.mls_from_json(mf.mls_to_json(s))
        assert back == s


def test_morphism_round_trip(square, two_point):
    p = mf.enumerate_epis(square, two_point)[0]
    back = mf.morphism_from_json(mf.morphism_to_json(p))
    assert back.map == p.map
    assert back.source.carrier == square.carrier


def test_morphism_stage_reference(seq_bound2):
    obj = mf.morphism_to_json(seq_bound2.bonds[0])
    obj["target"] = {"stage": 0}
    back = mf.morphism_from_json(obj, stages=seq_bound2.stages)
    assert back.target is seq_bound2.stages[0]


def test_morphism_json_rejects_bad_map(square, two_point):
    p = mf.enumerate_epis(square, two_point)[0]
    obj = mf.morphism_to_json(p)
    obj["map"] = ["0", "0", "0", "0"]  # not surjective
    with pytest.raises((ParseError, mf.NotSurjective)):
        mf.morphism_from_json(obj)


def test_sequence_round_trip(seq_bound2, tmp_path):
    paths = mf.save_sequence(seq_bound2, tmp_path)
    assert sorted(p.name for p in paths) == [
        "sequence.certificates.json",
        "sequence.json",
    ]
    back = mf.load_sequence(tmp_path / "sequence.json")
    assert [a.size for a in back.stages] == [1, 2, 4, 8]
    assert [b.map for b in back.bonds] == [b.map for b in seq_bound2.bonds]
    kinds = [type(p).__name__ for p in back.provenance]
    assert kinds[0] == "StartProvenance"
    assert set(kinds[1:]) == {"SaturationProvenance"}


def test_sequence_load_reverifies_bonds(seq_bound2, tmp_path):
    obj = mf.sequence_to_json(seq_bound2)
    obj["bonds"][0] = ["", ""][:1] * 2  # fine shape, then corrupt a value
    obj["bonds"][1] = ["0", "0", "0", "0"]  # constant map is not onto
    with pytest.raises((ParseError, mf.NotSurjective)):
        mf.sequence_from_json(obj)


def test_certificates_payload(seq_bound3):
    obj = cli_io.certificates_to_json(seq_bound3)
    assert obj["schema_version"] == 1
    steps = obj["stages"]
    assert sorted(steps) == ["1", "2"]
    # two problems over the point, eight over the 6-point prism
    assert len(steps["1"]) == 2
    assert len(steps["2"]) == 8


# ---------------------------------------------------------------------------
# text renderings


def test_algebra_dot_output(square):
    dot = cli_io.algebra_to_dot(square)
    assert dot.startswith("graph")
    assert dot.count(" -- ") == 4  # the square has four covering edges
    for label in square.point_strs():
        assert f'"{label}"' in dot


def test_sequence_csv(seq_bound2, tmp_path):
    path = tmp_path / "stages.csv"
    cli_io.sequence_csv(seq_bound2, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "stage,points,dim,walls"
    assert len(rows) == 5
    assert rows[1].startswith("0,1,0")
    assert rows[4].startswith("3,8,3")


# ---------------------------------------------------------------------------
# command line, in process


def test_cli_validate_valid(square_file, capsys):
    assert main(["validate", str(square_file)]) == 0
    assert "valid" in capsys.readouterr().out


def test_cli_validate_invalid(tmp_path, capsys):
    path = tmp_path / "open.json"
    dump_json_file(
        {"schema_version": 1, "dim": 3, "points": ["011", "101", "110"]}, path
    )
    assert main(["validate", str(path)]) == 1
    assert "missing" in capsys.readouterr().out


def test_cli_validate_malformed(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert main(["validate", str(path)]) == 2


def test_cli_validate_json_report(square_file, capsys):
    assert main(["validate", str(square_file), "--json-report"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["valid"] is True and payload["points"] == 4


def test_cli_lambda(tmp_path, capsys):
    out = tmp_path / "lam"
    assert main(["lambda", "3", "--out", str(out)]) == 0
    algebra = mf.algebra_from_json(load_json_file(out / "lambda_3.json"))
    assert algebra.size == 4
    systems = load_json_file(out / "lambda_3_systems.json")
    assert len(systems["systems"]) == 4


def test_cli_lambda_too_large(tmp_path):
    assert main(["lambda", "6", "--out", str(tmp_path / "x")]) == 3


def test_cli_fraisse_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["fraisse", "--bound", "2", "--levels", "4", "--out", str(out)])
    assert rc == 0
    for name in ("sequence.json", "sequence.certificates.json", "stages.csv", "growth.png"):
        assert (out / name).exists(), name
    seq = mf.load_sequence(out / "sequence.json")
    assert [a.size for a in seq.stages] == [1, 2, 4, 8]


def test_cli_fraisse_cap(tmp_path):
    rc = main(
        ["fraisse", "--bound", "2", "--levels", "3", "--cap", "3", "--out", str(tmp_path / "x")]
    )
    assert rc == 3


def test_cli_check_m1(seq2_dir, capsys):
    rc = main(
        [
            "check", "m1",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "2",
            "--family-a", "00,01",
            "--family-b", "10,11",
        ]
    )
    assert rc == 0
    assert "witness at stage 2" in capsys.readouterr().out


def test_cli_check_m2_bounded(seq2_dir, capsys):
    rc = main(
        [
            "check", "m2",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "2",
            "--family", "00,01;00,10",
        ]
    )
    assert rc == 1
    assert "no witness" in capsys.readouterr().out


def test_cli_check_m2_not_linked(seq2_dir):
    rc = main(
        [
            "check", "m2",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "2",
            "--family", "00,01;10,11",
        ]
    )
    assert rc == 2


def test_cli_check_m3(seq2_dir, capsys):
    rc = main(
        [
            "check", "m3",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "1",
            "--side", "0",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "witness at stage 2" in out


def test_cli_check_m3_bad_alpha(seq2_dir):
    rc = main(
        [
            "check", "m3",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "9",
            "--side", "0",
        ]
    )
    assert rc == 2


def test_cli_check_ext(seq2_dir, tmp_path, seq_bound2, two_point, one_point, capsys):
    f = mf.enumerate_epis(two_point, one_point)[0]
    obj = mf.morphism_to_json(f)
    obj["target"] = {"stage": 0}
    map_path = tmp_path / "ext.json"
    dump_json_file(obj, map_path)
    rc = main(
        [
            "check", "ext",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "0",
            "--map", str(map_path),
        ]
    )
    assert rc == 0
    assert "lift found at stage 1" in capsys.readouterr().out


def test_cli_check_ext_counterexample(seq2_dir, tmp_path, three_chain, one_point):
    f = mf.enumerate_epis(three_chain, one_point)[0]
    obj = mf.morphism_to_json(f)
    obj["target"] = {"stage": 0}
    map_path = tmp_path / "ext3.json"
    dump_json_file(obj, map_path)
    rc = main(
        [
            "check", "ext",
            "--seq", str(seq2_dir / "sequence.json"),
            "--alpha", "0",
            "--map", str(map_path),
        ]
    )
    assert rc == 1


def test_cli_check_baf_self(seq2_dir, capsys):
    rc = main(
        [
            "check", "baf",
            "--seq", str(seq2_dir / "sequence.json"),
            "--seq2", str(seq2_dir / "sequence.json"),
        ]
    )
    assert rc == 0
    assert "clean stop after 3 rounds" in capsys.readouterr().out


def test_cli_check_baf_stuck(seq2_dir, tmp_path, seq_bound3, capsys):
    out = tmp_path / "seq3"
    out.mkdir()
    mf.save_sequence(seq_bound3, out)
    rc = main(
        [
            "check", "baf",
            "--seq", str(out / "sequence.json"),
            "--seq2", str(seq2_dir / "sequence.json"),
        ]
    )
    assert rc == 1
    assert "stuck in the back half" in capsys.readouterr().out


def test_cli_export_algebra(square_file, tmp_path, capsys):
    dot = tmp_path / "sq.dot"
    assert main(["export", str(square_file), "--format", "dot", "--out", str(dot)]) == 0
    assert dot.read_text().startswith("graph")
    png = tmp_path / "sq.png"
    assert main(["export", str(square_file), "--format", "png", "--out", str(png)]) == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_export_sequence(seq2_dir, tmp_path):
    csv = tmp_path / "stages.csv"
    rc = main(
        ["export", str(seq2_dir / "sequence.json"), "--format", "csv", "--out", str(csv)]
    )
    assert rc == 0
    assert csv.read_text().startswith("stage,points,dim,walls")
    png = tmp_path / "growth.png"
    rc = main(
        ["export", str(seq2_dir / "sequence.json"), "--format", "png", "--out", str(png)]
    )
    assert rc == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_iso(square_file, tmp_path, three_chain, capsys):
    bent = mf.validate(["00", "01", "10"], 2)
    chain_path = tmp_path / "chain.json"
    bent_path = tmp_path / "bent.json"
    dump_json_file(mf.algebra_to_json(three_chain), chain_path)
    dump_json_file(mf.algebra_to_json(bent), bent_path)
    assert main(["iso", str(chain_path), str(bent_path)]) == 0
    assert main(["iso", str(chain_path), str(square_file)]) == 1


# ---------------------------------------------------------------------------
# the installed console script


def test_console_script_round_trip(tmp_path):
    out = tmp_path / "run"
    proc = subprocess.run(
        [
            "median-fraisse", "fraisse",
            "--bound", "2", "--levels", "3",
            "--out", str(out),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "sequence.json").exists()
    proc2 = subprocess.run(
        ["median-fraisse", "validate", str(tmp_path / "missing.json")],
        capture_output=True,
        text=True,
    )
    assert proc2.returncode == 2
