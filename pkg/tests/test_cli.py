import shutil
import subprocess
import sys

import pytest

from valence import corpus
from valence.automata import load_automaton, parse_automaton, serialize_automaton
from valence.cli import main
from valence.graph_core import parse_graph, serialize_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reduce_identity(capsys):
    code, out, _ = run(capsys, "reduce", "--graph", "b.graph", "--word", "+v -v")
    assert code == 0 and out.split() == ["@", "IDENTITY"]


def test_reduce_not_identity(capsys):
    code, out, _ = run(capsys, "reduce", "--graph", "b", "--word", "-v +v")
    assert code == 1 and out.split() == ["-v", "+v", "NOT-IDENTITY"]


def test_classify_forbidden_path(capsys):
    code, out, _ = run(capsys, "classify", "--graph", "p4.graph")
    assert code == 1 and "forbidden_path: u x y v" in out and "in_C: no" in out


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--graph", "z3")
    assert code == 0 and out.count("TimesZ") == 3


def test_lowerbound(capsys, tmp_path):
    fig = tmp_path / "lb.png"
    code, out, _ = run(capsys, "lowerbound", "--k", "10", "--m", "1", "--r", "2", "--s", "0", "--figure", str(fig))
    assert code == 0 and "witness n=11" in out and "1440" in out
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_lowerbound_needs_two_counters(capsys):
    code, _, err = run(capsys, "lowerbound", "--k", "10", "--m", "1", "--r", "1", "--s", "0")
    assert code == 2 and "error" in err


def test_member_and_enum(capsys):
    assert run(capsys, "member", "--auto", "anbn", "--word", "aabb")[:2] == (0, "accepted\n")
    assert run(capsys, "member", "--auto", "anbn", "--word", "aab")[:2] == (1, "rejected\n")
    code, out, _ = run(capsys, "member", "--auto", "l1", "--word", "1ccc", "--budget", "40")
    assert code == 1 and out.strip() == "not-within-budget"
    code, out, _ = run(capsys, "enum", "--auto", "anbn", "--maxlen", "6")
    assert code == 0 and out.split() == ["ab", "aabb", "aaabbb"]


def test_eliminate_verify(capsys, tmp_path):
    out_path = tmp_path / "out.auto"
    code, out, _ = run(capsys, "eliminate", "--graph", "z", "--auto", "z_eqcount", "--out", str(out_path),
                       "--verify-maxlen", "6")
    assert code == 0 and "EQUAL" in out
    B = load_automaton(str(out_path))
    assert B.lambda_free


def test_eliminate_outside_C(capsys):
    code, out, _ = run(capsys, "eliminate", "--auto", "l1")
    assert code == 1 and "not in C" in out


def test_parikh(capsys):
    code, out, _ = run(capsys, "parikh", "--nfa", "empty_nfa", "--maxlen", "6")
    assert code == 0 and "AGREE" in out


def test_l1(capsys):
    assert run(capsys, "l1", "--word", "10cc")[0] == 0
    assert run(capsys, "l1", "--word", "c0")[0] == 1


def test_errors(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "reduce", "--graph", "b")[0] == 2
    code, _, err = run(capsys, "reduce", "--graph", "no_such_graph", "--word", "@")
    assert code == 2 and "no such file" in err
    bad = tmp_path / "bad.graph"
    bad.write_text("vertex u\nedge u w\n")
    code, _, err = run(capsys, "reduce", "--graph", str(bad), "--word", "@")
    assert code == 2 and "line 2" in err


@pytest.mark.parametrize("name", corpus.graph_names())
def test_graph_files_round_trip(name, corpus_root):
    g = parse_graph((corpus_root / "graphs" / f"{name}.graph").read_text())
    assert parse_graph(serialize_graph(g)) == g


@pytest.mark.parametrize("name", corpus.machine_names())
def test_machine_files_round_trip(name, corpus_root):
    path = corpus_root / "machines" / f"{name}.auto"
    A = load_automaton(str(path))
    assert parse_automaton(serialize_automaton(A), base_dir=str(path.parent)) == A


def test_output_is_deterministic(capsys):
    first = run(capsys, "enum", "--auto", "bb_pal", "--maxlen", "6")
    assert run(capsys, "enum", "--auto", "bb_pal", "--maxlen", "6") == first


@pytest.mark.skipif(shutil.which("valence") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["valence", "l1", "--word", "10cc"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("member")
    res = subprocess.run([sys.executable, "-m", "valence.cli", "reduce", "--graph", "z", "--word", "-z +z"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "IDENTITY" in res.stdout
