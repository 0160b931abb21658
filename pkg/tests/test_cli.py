import json
import subprocess
import sys

import pytest

from tropdiv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def ok(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestExamples:
    def test_rank_ladder(self, capsys):
        code, out, _ = run(capsys, "rank", "corpus/ladder4.json", "corpus/ladder4-D.json")
        assert code == 0 and out == '{"rank":1}\n'

    def test_condition_i(self, capsys):
        code, out, _ = run(capsys, "condition-i", "corpus/three-petal.json")
        assert json.loads(out) == {"holds": False, "witness": {"vertex": "v0", "count": 3, "bound": 2}}

    def test_rank_negative(self, capsys):
        assert ok(capsys, "rank", "tree-path3", "tree-path3-negative") == {"rank": -1}

    def test_genus(self, capsys):
        assert ok(capsys, "genus", "three-petal-weighted") == {"weighted": 4, "unweighted": 3}

    def test_hyp_rank(self, capsys):
        assert ok(capsys, "hyp-rank", "three-petal", "three-petal-D") == {"rank": 1, "p": 1}

    def test_p_with_base(self, capsys):
        assert ok(capsys, "p", "ladder4", "ladder4-D", "--base", "w2") == {"p": 1}


class TestEverySubcommand:
    @pytest.mark.parametrize(
        "argv",
        [
            ["reduce", "ladder4", "ladder4-D", "--base", "w2"],
            ["equiv", "banana3", "banana3-D", "banana3-D"],
            ["canonical", "three-petal-weighted", "--weighted"],
            ["rr-check", "banana3", "banana3-D"],
            ["hyperelliptic", "theta"],
            ["involution", "ladder4"],
            ["extend", "ladder4", "ladder4-D", "--base", "v1"],
            ["wdr", "theta", "-d", "2", "-r", "1"],
            ["oracle-rank", "banana3", "banana3-D", "--method", "explicit"],
            ["oracle-equiv", "banana3", "banana3-D", "banana3-D"],
            ["rank", "three-petal-weighted", "three-petal-D", "--weighted"],
        ],
    )
    def test_runs(self, capsys, argv):
        ok(capsys, *argv)

    def test_moderator_negative_base(self, tmp_path, capsys):
        d = tmp_path / "d.json"
        d.write_text(json.dumps([{"at": "v1", "coeff": -1}, {"at": "v2", "coeff": 1}]))
        dot = tmp_path / "o.dot"
        doc = ok(capsys, "moderator", "banana3", str(d), "--base", "v1", "--orientation-dot", str(dot))
        assert doc["K"]["v1"] == -1 and doc["order"][0] == "v1"
        assert dot.read_text().startswith("digraph")

    def test_emit_dot(self, tmp_path, capsys):
        dot = tmp_path / "g.dot"
        ok(capsys, "genus", "theta", "--emit-dot", str(dot))
        assert "e1" in dot.read_text()

    def test_pretty(self, capsys):
        code, out, _ = run(capsys, "genus", "theta", "--pretty")
        assert out.startswith("{\n  ")


class TestExitCodes:
    def test_malformed(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "genus", str(bad))
        assert code == 2 and json.loads(err)["error"]["type"] == "ValidationError"

    def test_float_length(self, tmp_path, capsys):
        g = tmp_path / "g.json"
        g.write_text(json.dumps({"vertices": [{"id": "a"}, {"id": "b"}], "edges": [{"id": "e", "tail": "a", "head": "b", "length": 1.5}]}))
        assert run(capsys, "genus", str(g))[0] == 2

    def test_missing_file(self, capsys):
        assert run(capsys, "genus", "no/such/graph.json")[0] == 2

    def test_precondition(self, capsys):
        code, _, err = run(capsys, "p", "tree-path3", "tree-path3-negative")
        assert code == 3 and json.loads(err)["error"]["type"] == "PreconditionError"

    def test_resource(self, capsys):
        code, _, err = run(capsys, "oracle-rank", "ladder4", "ladder4-D", "--caps", "max_vertices=5")
        assert code == 4

    def test_bad_caps(self, capsys):
        assert run(capsys, "wdr", "theta", "-d", "2", "-r", "1", "--caps", "lots")[0] == 2


def test_non_hyperelliptic_hyp_rank(tmp_path, capsys):
    d = tmp_path / "d.json"
    d.write_text(json.dumps([{"at": "a", "coeff": 2}]))
    code, _, err = run(capsys, "hyp-rank", "K4", str(d))
    assert code == 3


def test_byte_identical_runs():
    argv = [sys.executable, "-m", "tropdiv.cli", "wdr", "banana3", "-d", "3", "-r", "1"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    again = subprocess.run(argv, capture_output=True, check=True).stdout
    parallel = subprocess.run(argv + ["--jobs", "3"], capture_output=True, check=True).stdout
    assert first == again == parallel
