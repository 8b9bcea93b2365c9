import json

import pytest

from termlab.cli import main, parse_script

from conftest import PROGRAMS


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prog4_sct(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "analyze", "prog4", "--method", "sct", "--clamp", "4", "--criterion", "A")
    assert code == 0 and "verdict: terminates" in out


def test_prog5_xy_unknown(capsys):
    code, out, _ = run_cli(capsys, "analyze", "prog5.tl", "--method", "sct", "--functions", "x,y")
    assert code == 1 and "verdict: unknown" in out


def test_trt_size(capsys):
    code, out, _ = run_cli(capsys, "ramsey", "trt-size", "3", "2")
    assert code == 0 and out.strip() == "5"


def test_json_is_deterministic(capsys, tmp_path):
    docs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["analyze", "prog5", "--method", "sct", "--functions", "x,y,x+y", "--clamp", "6", "--json", str(path)]) == 0
        doc = json.loads(path.read_text())
        assert list(doc) == [
            "tool_version", "program", "method", "verdict", "certificate", "checked_domain", "diagnostics", "timing",
        ]
        doc.pop("timing")
        docs.append(json.dumps(doc))
    capsys.readouterr()
    assert docs[0] == docs[1]


@pytest.mark.parametrize("name", PROGRAMS)
def test_every_fixture_runs(capsys, name):
    start = {"prog2": "1,1", "prog3": "3,3,3", "prog4": "2,2,2,2", "prog5": "4,7", "prog6": "5,-1",
             "not_transitive": "9"}[name]
    code, out, _ = run_cli(capsys, "simulate", name, "--start", start, "--seed", "1", "--max-steps", "20")
    assert code == 0 and out.splitlines()[0].startswith("# ")


def test_simulate_script_and_figure(capsys, tmp_path):
    fig = tmp_path / "trace.png"
    code, out, _ = run_cli(capsys, "simulate", "prog4", "--start", "1,1,1,1", "--script", "2:y=2", "--figure", str(fig))
    assert code == 0
    assert out.splitlines()[1:3] == ["1,1,1,1", "1,0,2,1"]
    assert fig.stat().st_size > 0


def test_script_parser():
    s = parse_script("2:y=2;1")
    assert [(c.case, c.input_map) for c in s.steps] == [(2, {"y": 2}), (1, {})]


def test_transinv_counterexample(capsys, tmp_path):
    out_json = tmp_path / "t.json"
    code, out, _ = run_cli(
        capsys, "analyze", "not_transitive", "--method", "transinv", "--invariant", "not_transitive_strict",
        "--box", "1:10", "--json", str(out_json),
    )
    assert code == 1 and "(2,) -> (1,)" in out
    doc = json.loads(out_json.read_text())
    assert doc["checked_domain"] == {"box": [[1, 10]], "input_cap": 3}


def test_transinv_exact_case_split(capsys):
    code, out, _ = run_cli(capsys, "analyze", "prog5", "--method", "transinv", "--invariant", "prog5", "--box", "1:15")
    assert code == 0 and "T2+case 2 -> T4" in out


def test_ranking(capsys):
    assert run_cli(capsys, "analyze", "prog4", "--method", "ranking", "--rank", "w,x,y,z")[0] == 0
    assert run_cli(capsys, "analyze", "prog4", "--method", "ranking", "--rank", "x,y,z,w")[0] == 1


def test_matrix_ops(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "matrix", "pow", "prog5_C2", "--exponent", "2")
    assert code == 0 and out.split() == ["2", "-1", "inf", "inf", "-1"]
    code, out, _ = run_cli(capsys, "matrix", "closure", "appendix_Z", "--clamp", "3", "--figure", str(tmp_path / "m.png"))
    assert out.count("# element") == 3


def test_audit(capsys):
    code, out, _ = run_cli(capsys, "audit", "prog5", "--case", "1", "--matrix", "prog5_D1", "--functions", "x,y,x+y", "--box", "1:10")
    assert code == 1 and "(3, 1)" in out and "entry (1,3)" in out


def test_segments(capsys):
    code, out, _ = run_cli(capsys, "segments", "prog4", "--functions", "w,x", "--box", "1:2", "--max-len", "3")
    assert code == 1 and "no measure decreases" in out


def test_ramsey_file_commands(capsys, tmp_path):
    f = tmp_path / "col.txt"
    assert main(["ramsey", "trt-build", "3", "2", "--out", str(f), "--figure", str(tmp_path / "c.png")]) == 0
    assert main(["ramsey", "check-transitive", str(f)]) == 0
    assert main(["ramsey", "mip", str(f)]) == 0
    assert main(["ramsey", "search-homog", str(f), "3"]) == 1
    capsys.readouterr()
    code, out, _ = run_cli(capsys, "ramsey", "monotone", "3", "2,1,4,3,5")
    assert code == 0 and out.strip() == "increasing length 3: 2 4 5"


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "nosuch.tl", "--method", "sct"],
        ["analyze", "prog4", "--method", "sct", "--bogus"],
        ["analyze", "prog4", "--method", "ranking"],
        ["analyze", "prog6", "--method", "sct", "--functions", "y"],
        ["simulate", "prog5", "--start", "1,2,3", "--seed", "1"],
        ["matrix", "mul", "prog4_C1", "prog5_C1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()
