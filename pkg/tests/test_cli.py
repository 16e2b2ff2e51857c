"""End-to-end tests of the command line through main()."""

import json

import pytest

from src.main import main
from src.utils.logger import setup_logger


@pytest.fixture(autouse=True)
def quiet_logging():
    yield
    setup_logger()


def instance(instances_dir, name):
    return str(instances_dir / name)


def test_kdst_on_k4(instances_dir, capsys):
    assert main(["kdst", instance(instances_dir, "k4.graph"), "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "problem: kdst" in out
    assert "feasible: yes" in out
    assert "size: 6" in out
    assert "class 2:" in out


def test_forest_deadlines_prints_the_schedule(instances_dir, capsys):
    assert main(["forest-deadlines", instance(instances_dir, "parallel_deadlines.graph")]) == 0
    out = capsys.readouterr().out
    assert "size: 3" in out
    assert "day 3: e2 (a b)" in out


@pytest.mark.parametrize("argv, expected", [
    (["colorful-st", "colorful_triangle.graph"], "feasible: yes"),
    (["colorful-st", "mono_triangle.graph"], "feasible: no"),
    (["arboricity", "k4.graph"], "value: 2"),
    (["tree-packing", "k4.graph"], "value: 2"),
    (["shannon", "k4.graph"], "winner: Short"),
    (["bipartite-matching", "c6_bipartite.graph"], "size: 3"),
    (["scheduling-intersect", "jobs.txt"], "size: 3"),
    (["linear-intersect", "gf2_a.mat", "gf2_b.mat"], "size: 2"),
    (["intersect", "graphic_k4.json", "partition_k4.json"], "size: 3"),
    (["kfold", "uniform_6_2.json", "--k", "3"], "size: 6"),
])
def test_problems(instances_dir, capsys, argv, expected):
    args = [a if a.startswith("--") or a.isdigit() or i == 0 else instance(instances_dir, a)
            for i, a in enumerate(argv)]
    assert main(args) == 0
    assert expected in capsys.readouterr().out


def test_stats_only(instances_dir, capsys):
    assert main(["kdst", instance(instances_dir, "k4.graph"), "--stats-only"]) == 0
    out = capsys.readouterr().out
    assert "oracle:" in out
    assert "size:" not in out


def test_config_file_sets_defaults(instances_dir, tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"output": {"stats_only": True}}), encoding="utf-8")
    assert main(["kforest", instance(instances_dir, "k4.graph"), "--config", str(config)]) == 0
    assert "size:" not in capsys.readouterr().out


def test_json_report_then_verify(instances_dir, tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["kdst", instance(instances_dir, "k4.graph"), "--json", str(report)]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["problem"] == "kdst"
    assert data["size"] == 6
    capsys.readouterr()
    assert main(["verify", str(report)]) == 0
    assert "verified: kdst, size 6" in capsys.readouterr().out


def test_verify_rejects_a_tampered_report(instances_dir, tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["kforest", instance(instances_dir, "k4.graph"), "--json", str(report)]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    data["classes"][1] = data["classes"][0]
    report.write_text(json.dumps(data), encoding="utf-8")
    assert main(["verify", str(report)]) == 2
    assert "error:" in capsys.readouterr().err


def test_verify_missing_and_unreadable_reports(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "nope.json")]) == 3
    garbage = tmp_path / "garbage.json"
    garbage.write_text("not json", encoding="utf-8")
    assert main(["verify", str(garbage)]) == 2


@pytest.mark.parametrize("extra", [["--k", "0"], ["--k", "99"], ["--epsilon", "0"], ["--epsilon", "-0.5"]])
def test_bad_parameters_exit_2(instances_dir, capsys, extra):
    assert main(["kforest", instance(instances_dir, "k4.graph")] + extra) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_malformed_instance_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("n 2 m 1\na b colour=red\n", encoding="utf-8")
    assert main(["kforest", str(bad)]) == 2
    err = capsys.readouterr().err
    assert f"{bad}:2:" in err


def test_non_bipartite_matching_exit_2(instances_dir):
    assert main(["bipartite-matching", instance(instances_dir, "k4.graph")]) == 2


def test_missing_instance_exit_3(tmp_path, capsys):
    assert main(["arboricity", str(tmp_path / "missing.graph")]) == 3
    assert "error:" in capsys.readouterr().err


def test_unwritable_report_exit_3(instances_dir, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    assert main(["kforest", instance(instances_dir, "k4.graph"), "--json", str(blocker / "r.json")]) == 3


def test_epsilon_run(instances_dir, capsys):
    assert main(["bipartite-matching", instance(instances_dir, "c6_bipartite.graph"), "--epsilon", "0.5"]) == 0
    assert "problem: bipartite-matching" in capsys.readouterr().out


def test_bench(capsys):
    assert main(["bench", "--trials", "6", "--workers", "2", "--max-n", "6", "--seed", "3"]) == 0
    assert "trials: 6, passed: 6, failed: 0" in capsys.readouterr().out


def test_bench_bad_arguments_exit_2():
    assert main(["bench", "--trials", "2", "--workers", "0"]) == 2


def test_log_file(instances_dir, tmp_path):
    log = tmp_path / "run.log"
    assert main(["kdst", instance(instances_dir, "k4.graph"), "--log-level", "INFO", "--log-file", str(log)]) == 0
    setup_logger()
    assert "kdst solved in" in log.read_text(encoding="utf-8")


def test_usage_errors_exit_through_argparse(instances_dir):
    with pytest.raises(SystemExit) as info:
        main(["sudoku", instance(instances_dir, "k4.graph")])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["intersect", instance(instances_dir, "graphic_k4.json")])


def test_kdst_beyond_the_edge_count_reports_infeasible(tmp_path, capsys):
    single = tmp_path / "edge.graph"
    single.write_text("n 2 m 1\na b id=e0\n", encoding="utf-8")
    assert main(["kdst", str(single), "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "feasible: no" in out
    assert "target: 2" in out
    assert main(["kforest", str(single), "--k", "2"]) == 2
