import json

import pytest

from basketcheck.cli import main
from basketcheck.data import read_fixture

PAPER_VALUES = {
    "P = ? [F (s = 6)]": 0.4347821160949293,
    "P = ? [F (s = 9) {(s = 10)}]": 0.3999999999966359,
    "P = ? [F (s = 13)]": 1.0,
    "P = ? [F ((s = 8) | (s = 9))]": 0.4347821160949293,
    "P = ? [F (s = 4)]": 0.666666030883789,
}


@pytest.fixture(autouse=True)
def default_engine(monkeypatch):
    monkeypatch.delenv("BASKETCHECK_ENGINE", raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_golden_report(capsys, model_path, props_path):
    code, out, _ = run(capsys, "check", model_path, "--props", props_path)
    assert code == 0
    assert out == read_fixture("golden_report.txt")


def test_golden_report_matches_published_table():
    blocks = read_fixture("golden_report.txt").strip().split("\n\n")
    assert len(blocks) == 10
    expected = [
        ("P < 0.7 [F (s = 12)]", 7, "true (property satisfied in the initial state)"),
        ("P < 0.5 [F (s = 12) {(s = 4)}]", 7, "true (property satisfied in all filter states)"),
        ("P >= 0.5 [F (s = 9) {(s = 8)}]", 4, "true (property satisfied in all filter states)"),
        ("P < 0.8 [F (s = 7)]", 12, "true (property satisfied in the initial state)"),
        ("P > 0.5 [F (s = 12) {(s = 4)}]", 7,
         "false (property not satisfied in all filter states)"),
    ]
    for block, (prop, count, result) in zip(blocks, expected):
        first, second = block.split("\n")
        assert first == f"Number of states satisfying {prop}: {count}"
        assert second == f"Result: {result}"
    for block in blocks[5:]:
        first, second = block.split("\n")
        prop = first.removeprefix("Property: ")
        value = float(second.split()[1])
        assert abs(value - PAPER_VALUES[prop]) <= 1e-4


def test_inline_query(capsys, model_path):
    code, out, _ = run(capsys, "check", model_path, "--prop", "P=? [F (s=13)]")
    assert code == 0
    assert out.splitlines()[-1] == "Result: 1.0 (value in the initial state)"


def test_false_verdict_exits_zero(capsys, model_path):
    code, out, _ = run(capsys, "check", model_path, "--prop", "P > 0.5 [F (s = 12) {(s = 4)}]")
    assert code == 0
    assert "Result: false" in out


def test_malformed_property(capsys, model_path):
    code, _, err = run(capsys, "check", model_path, "--prop", "P < [F s=1]")
    assert code == 1
    assert "line 1, column 5" in err


def test_bad_props_file(capsys, tmp_path, model_path):
    bad = tmp_path / "bad.pctl"
    bad.write_text("P=? [F s=1]\nP=? [F s=\n")
    code, _, err = run(capsys, "check", model_path, "--props", bad)
    assert code == 1
    assert "line 2" in err


def test_unknown_identifier_exit(capsys, model_path):
    code, _, err = run(capsys, "check", model_path, "--prop", "P=? [F t=1]")
    assert code == 1
    assert "unknown identifier 't'" in err


def test_non_convergence_exit(capsys, model_path):
    code, _, err = run(capsys, "check", model_path, "--prop", "P=? [F s=6]",
                       "--max-iters", 3)
    assert code == 2
    assert "did not converge" in err


def test_exactly_one_property_source(capsys, model_path, props_path):
    assert run(capsys, "check", model_path)[0] == 1
    assert run(capsys, "check", model_path, "--prop", "P=? [F s=1]",
               "--props", props_path)[0] == 1


def test_exact_engine_json(capsys, model_path):
    code, out, _ = run(capsys, "check", model_path, "--prop", "P=? [F s=9 {s=10}]",
                       "--engine", "exact", "--format", "json")
    assert code == 0
    [result] = json.loads(out)
    assert result["values"] == [{"state": 10, "value": "0.4", "exact": "2/5"}]
    assert result["context"] == "value in the filter state"
    assert result["engine"]["method"] == "exact"


def test_bound_json(capsys, model_path):
    _, out, _ = run(capsys, "check", model_path, "--prop", "P<0.7 [F (s=12)]",
                    "--format", "json")
    [result] = json.loads(out)
    assert result["count"] == 7 and result["verdict"] is True
    assert result["satisfying_states"] == [0, 1, 2, 4, 5, 7, 13]
    assert result["engine"]["iterations"] > 0


def test_csv_output(capsys, model_path, props_path, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "check", model_path, "--props", props_path,
                       "--format", "csv", "--output", target)
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "property,count,result,context"
    assert len(lines) == 11


def test_engine_env(capsys, monkeypatch, model_path):
    monkeypatch.setenv("BASKETCHECK_ENGINE", "exact")
    _, out, _ = run(capsys, "check", model_path, "--prop", "P=? [F s=6]", "--format", "json")
    assert json.loads(out)[0]["values"][0]["exact"] == "10/23"


def test_curve(capsys, model_path):
    code, out, _ = run(capsys, "curve", model_path, "--goal", "s=4", "--k-max", 50)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "step,probability"
    assert len(lines) == 52
    assert abs(float(lines[-1].split(",")[1]) - 2 / 3) < 1e-3


def test_curve_k0(capsys, model_path):
    _, out, _ = run(capsys, "curve", model_path, "--goal", "s=4", "--k-max", 0)
    assert out.splitlines() == ["step,probability", "0,0"]


def test_curve_goal_13_tail(capsys, model_path):
    _, out, _ = run(capsys, "curve", model_path, "--goal", "s=13", "--k-max", 200)
    assert abs(float(out.splitlines()[-1].split(",")[1]) - 1.0) <= 1e-6


def test_curve_from_filter_with_svg(capsys, model_path, tmp_path):
    target = tmp_path / "fig6.csv"
    code, _, err = run(capsys, "curve", model_path, "--prop", "P=? [F (s=9) {(s=10)}]",
                       "--k-max", 40, "--output", target, "--svg")
    assert code == 0
    svg = target.with_suffix(".svg")
    assert svg.exists() and "<svg" in svg.read_text()[:500]
    rows = target.read_text().splitlines()
    assert rows[1] == "0,0"
    assert float(rows[2].split(",")[1]) == 0.25


def test_simulate(capsys, model_path):
    code, out, _ = run(capsys, "simulate", model_path, "--goal", "s=6",
                       "--samples", 100_000, "--seed", 17)
    assert code == 0
    again = run(capsys, "simulate", model_path, "--goal", "s=6",
                "--samples", 100_000, "--seed", 17)[1]
    assert out == again
    estimate = float(out.split()[1])
    assert abs(estimate - 10 / 23) < 0.01
    assert "Censored paths: 0" in out and "Seed: 17" in out


def test_simulate_json_start_in_goal(capsys, model_path):
    _, out, _ = run(capsys, "simulate", model_path, "--goal", "s=0", "--samples", 100,
                    "--format", "json")
    data = json.loads(out)
    assert data["estimate"] == 1.0 and data["hits"] == 100


def test_simulate_zero_samples(capsys, model_path):
    code, _, err = run(capsys, "simulate", model_path, "--goal", "s=6", "--samples", 0)
    assert code == 1


def test_graph(capsys, model_path):
    code, out, _ = run(capsys, "graph", model_path)
    assert code == 0
    assert out.startswith("digraph")
    assert out.count("[label=\"s=") == 14


def test_info(capsys, model_path):
    code, out, _ = run(capsys, "info", model_path)
    assert code == 0
    # the model text has 22 probabilistic branches and one "true" self-loop
    assert out.splitlines()[0] == "states: 14, transitions: 23"
    assert "validation: ok" in out


def test_invalid_model(capsys, tmp_path):
    bad = tmp_path / "bad.pm"
    bad.write_text("dtmc module m s:[0..1] init 0; [] s=0 -> 0.5:(s'=1); endmodule")
    assert run(capsys, "info", bad)[0] == 1
    assert run(capsys, "graph", tmp_path / "missing.pm")[0] == 1


def test_fix_deadlocks_flag(capsys, tmp_path):
    model = tmp_path / "dead.pm"
    model.write_text("dtmc module m s:[0..1] init 0; [] s=0 -> (s'=1); endmodule")
    assert run(capsys, "info", model)[0] == 1
    code, out, _ = run(capsys, "info", model, "--fix-deadlocks")
    assert code == 0 and "transitions: 2" in out


def test_merge_uniform_flag(capsys, tmp_path):
    model = tmp_path / "overlap.pm"
    model.write_text("dtmc module m s:[0..1] init 0; [] true -> (s'=0); "
                     "[] true -> (s'=1); endmodule")
    code, _, err = run(capsys, "info", model)
    assert code == 1 and "overlapping guards" in err
    code, out, _ = run(capsys, "check", model, "--merge-uniform", "--prop",
                       "P=? [F<=1 s=1]")
    assert code == 0 and "Result: 0.5" in out
