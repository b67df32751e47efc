"""Command-line interface: exit codes, JSON shapes, reproducibility."""

import csv
import json

import pytest

from pedigree.cli import main

from conftest import ALICE_TOUR, BOB_TOUR

ALICE_TEXT = " ".join(map(str, ALICE_TOUR))
BOB_TEXT = " ".join(map(str, BOB_TOUR))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_adjacency_positive(capsys):
    code, out, _ = run_cli(
        capsys, "adjacency", "--tour-a", ALICE_TEXT, "--tour-b", BOB_TEXT
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["adjacent"] is True
    assert doc["n"] == 10
    assert "graph" not in doc


def test_adjacency_negative_and_dump(capsys):
    code, out, _ = run_cli(
        capsys,
        "adjacency",
        "--tour-a", "1 4 2 5 3",
        "--tour-b", "1 2 3 4 5",
        "--dump-graph",
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["adjacent"] is False
    assert doc["graph"]["vertices"] == [4, 5]
    assert doc["graph"]["edges"] == []


def test_adjacency_accepts_history_text(capsys):
    code, out, _ = run_cli(
        capsys,
        "adjacency",
        "--tour-a", "4: 1 2\n5: 2 4\n",
        "--tour-b", "4: 1 3\n5: 1 2\n",
    )
    assert code == 0 or code == 1
    assert json.loads(out)["n"] == 5


def test_adjacency_bad_input_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "adjacency", "--tour-a", "1 2 x", "--tour-b", "1 2 3 4"
    )
    assert code == 2
    assert "error" in err


def test_decode_replay_roundtrip(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "decode", "--tour", ALICE_TEXT)
    assert code == 0
    doc = json.loads(out)
    assert doc["4"] == [1, 2]
    assert doc["10"] == [3, 9]
    path = tmp_path / "hist.json"
    path.write_text(out)
    code, out, _ = run_cli(capsys, "replay", "--history", str(path))
    assert code == 0
    assert json.loads(out)["tour"] == ALICE_TEXT


def test_replay_accepts_history_lines(capsys):
    code, out, _ = run_cli(capsys, "replay", "--history", "4: 1 2\n5: 2 4")
    assert code == 0
    assert json.loads(out) == {"tour": "1 4 5 2 3", "n": 5}


def test_simulate_summary_and_seed_echo(capsys):
    code, out1, _ = run_cli(
        capsys, "simulate", "--n", "20", "--trials", "50"
    )
    assert code == 0
    doc = json.loads(out1)
    seed = doc["seed"]
    code, out2, _ = run_cli(
        capsys, "simulate", "--n", "20", "--trials", "50", "--seed", str(seed)
    )
    assert code == 0
    assert out1 == out2


def test_simulate_emit_csv(capsys, tmp_path):
    path = tmp_path / "steps.csv"
    code, out, _ = run_cli(
        capsys,
        "simulate",
        "--n", "10",
        "--trials", "4",
        "--seed", "5",
        "--emit", str(path),
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"] == 4 * 7
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 28
    assert list(rows[0]) == ["trial", "n", "move_class", "dS", "dT", "S", "T", "isolated"]
    # S and T columns accumulate their deltas from S=3, T=0
    s, t = 3, 0
    for row in rows:
        if row["trial"] != "0":
            break
        s += int(row["dS"])
        t += int(row["dT"])
        assert int(row["S"]) == s
        assert int(row["T"]) == t
        assert row["move_class"] in ("c", "d")
    # the emitting run and the fast path agree on the summary
    code, fast, _ = run_cli(
        capsys, "simulate", "--n", "10", "--trials", "4", "--seed", "5"
    )
    fast_doc = json.loads(fast)
    for key in ("mean_isolated", "mean_final_common", "mean_final_components"):
        assert doc[key] == fast_doc[key]


def test_simulate_scripted_strategy(capsys, tmp_path):
    script = tmp_path / "script.txt"
    script.write_text("".join(f"{k}: 1 {k-1}\n" for k in range(4, 13)))
    code, out, _ = run_cli(
        capsys,
        "simulate",
        "--strategy", f"scripted:{script}",
        "--n", "12",
        "--trials", "8",
        "--seed", "9",
    )
    assert code == 0
    assert json.loads(out)["strategy"].startswith("scripted:")
    # too short a script is a usage error
    code, _, err = run_cli(
        capsys,
        "simulate",
        "--strategy", f"scripted:{script}",
        "--n", "40",
        "--trials", "1",
    )
    assert code == 2
    assert "scripted history ends at 12" in err


def test_validate_suite_roundtrip(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys,
        "validate",
        "--suite", "lemma10",
        "--seed", "11",
        "--n", "6",
        "--json", str(out_path),
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["observed"] == "1/5"
    assert json.loads(out_path.read_text()) == doc


def test_skeleton_command(capsys, tmp_path):
    path = tmp_path / "deg.csv"
    code, out, _ = run_cli(capsys, "skeleton", "--n", "4", "--csv", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["vertex_count"] == 3
    assert doc["is_complete"] is True
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    assert all(row["degree"] == "2" for row in rows)


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
