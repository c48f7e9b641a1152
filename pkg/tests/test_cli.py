import json
import subprocess
import sys

import pytest

from treesolver import cli
from treesolver.engine import InvariantViolation
from treesolver.generators import winning_text

INTRO = "~(ex y. x = f(y) & ~(ex z, w. x = f(z) & w = f(w)))"


@pytest.fixture
def write(tmp_path):
    def _write(text, name="p.fol"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def test_solve_prints_the_answer(write, capsys):
    assert cli.main(["solve", write(INTRO)]) == 0
    assert capsys.readouterr().out.strip() == "true"


def test_solve_json_report(write, capsys):
    assert cli.main(["solve", write("ex y. x = f(y) & finite(y)"), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["schema"] == 1 and report["status"] == "completed"
    assert report["answer"]["kind"] == "disjunction"
    stats = report["stats"]
    assert stats["total_rules"] == sum(stats["rules_fired"].values())
    assert min(stats["rules_fired"].values()) > 0 and stats["peak_nodes"] > 0


def test_trace_has_one_line_per_rule(write, capsys):
    assert cli.main(["solve", write(winning_text(1)), "--trace", "--json"]) == 0
    captured = capsys.readouterr()
    lines = [l for l in captured.err.splitlines() if l.startswith("rule ")]
    assert len(lines) == json.loads(captured.out)["stats"]["total_rules"]
    assert all(len(l.split()) == 6 and l.split()[2] == "node" and l.split()[4] == "measure" for l in lines)


def test_stats_text(write, capsys):
    assert cli.main(["solve", write("x = y"), "--stats"]) == 0
    out = capsys.readouterr().out
    assert "peak nodes" in out and "rules" in out


def test_bench_winning_two(capsys):
    assert cli.main(["bench", "winning", "2", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert len(report["answer"]["disjuncts"]) == 2
    assert report["positions"] == [[1, 0], [3, 0]]


def test_node_limit_exit(write, capsys):
    assert cli.main(["solve", write(winning_text(2)), "--max-nodes", "10"]) == 2
    out = capsys.readouterr().out
    assert out.startswith("resource limit") and "peak nodes 11" in out


def test_timeout_exit(capsys):
    assert cli.main(["bench", "winning", "4", "--timeout-ms", "1", "--json"]) == 2
    assert json.loads(capsys.readouterr().out)["status"] == "timeout"


def test_parse_error_exit(write, capsys):
    assert cli.main(["solve", write("f(x")]) == 1
    assert "parse error" in capsys.readouterr().err


def test_missing_file_exit(tmp_path, capsys):
    assert cli.main(["solve", str(tmp_path / "absent.fol")]) == 1


def test_invariant_violation_exit(write, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise InvariantViolation("rule 3 did not decrease the measure")

    monkeypatch.setattr(cli, "solve", broken)
    assert cli.main(["solve", write("x = y")]) == 3


def test_limits_must_be_positive(write):
    with pytest.raises(SystemExit):
        cli.main(["solve", write("x = y"), "--max-nodes", "0"])


def test_bench_random(capsys):
    assert cli.main(["bench", "random", "--depth", "2", "--count", "3", "--seed", "5", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert [r["seed"] for r in report["results"]] == [5, 6, 7]
    assert all(r["status"] == "completed" for r in report["results"])


def test_bench_random_closed_decides(capsys):
    assert cli.main(["bench", "random", "--depth", "3", "--count", "4", "--seed", "0", "--closed", "--json"]) == 0
    kinds = {r["kind"] for r in json.loads(capsys.readouterr().out)["results"]}
    assert kinds <= {"true", "false"}


def test_oracle_sat(write, capsys):
    assert cli.main(["oracle", "sat", write("ex y. x = f(y) & finite(x)")]) == 0
    assert cli.main(["oracle", "sat", write("x = f(x) & finite(x)", "q.fol")]) == 0
    assert capsys.readouterr().out.split() == ["sat", "unsat"]


def test_oracle_sat_rejects_other_shapes(write):
    assert cli.main(["oracle", "sat", write("~(x = y)")]) == 1


def test_oracle_game(capsys):
    assert cli.main(["oracle", "game", "3", "8"]) == 0
    assert capsys.readouterr().out.split() == ["(1,0)", "(3,0)", "(5,0)"]


def test_module_entry_point(write):
    done = subprocess.run(
        [sys.executable, "-m", "treesolver", "solve", write("false")], capture_output=True, text=True
    )
    assert done.returncode == 0 and done.stdout.strip() == "false"
