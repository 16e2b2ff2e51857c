"""Tests for instance files, the problem solvers, run reports and bench."""

import json

import pytest

from src.apps.bench import run_bench, run_trial, verify_report
from src.apps.instance_io import (
    align_edges,
    bipartite_sides,
    color_partition,
    jobs_to_matroids,
    read_graph,
    read_jobs,
    read_linear,
    read_matroid_json,
)
from src.apps.run_report import RunReport, load_report, run, save_report
from src.apps.solvers import (
    ProblemSpec,
    deadline_matroid,
    solve,
    solve_mixed,
    solve_shannon,
    solve_tree_packing,
    verify_classes,
)
from src.core.errors import InstanceFormatError, InvalidArgument, MalformedInstance, VerificationFailed
from src.core.matroids import Graphic, Linear, Uniform


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def fixture(instances_dir, name):
    return str(instances_dir / name)


class TestReadGraph:
    def test_fixture_with_ids_and_deadlines(self, instances_dir):
        graph = read_graph(fixture(instances_dir, "parallel_deadlines.graph"))
        assert graph.num_vertices == 4
        assert graph.num_edges == 4
        assert graph.vertex_labels == ["a", "b", "c", "d"]
        assert graph.edge_labels == ["e1", "e2", "e3", "e4"]
        assert graph.deadline == [1, 3, 2, 2]
        assert graph.release == [1, 1, 1, 1]
        assert graph.edges[0] == graph.edges[1] == (0, 1)

    def test_defaults(self, tmp_path):
        graph = read_graph(write(tmp_path, "g.graph", "n 3 m 2\nx y w=2.5\ny x c=red\n"))
        assert graph.edge_labels == ["e1", "e2"]
        assert graph.colors == [None, "red"]
        assert graph.weights == [2.5, None]
        # the third vertex never appears on an edge
        assert graph.vertex_labels == ["x", "y", "v2"]
        assert not graph.is_connected()
        assert graph.summary() == {"vertices": 3, "edges": 2}

    @pytest.mark.parametrize("text, line", [
        ("n 3\na b\n", 1),
        ("n 3 m 1\na\n", 2),
        ("n 3 m 1\na b x=1\n", 2),
        ("n 3 m 1\na b w=heavy\n", 2),
        ("# comment\nn 2 m 2\na b\nb c\n", 4),
        ("n 3 m 1\na b rel=3 dl=2\n", 2),
        ("n 3 m 1\na b rel=0\n", 2),
        ("n two m 1\na b\n", 1),
    ])
    def test_format_errors_carry_the_line(self, tmp_path, text, line):
        path = write(tmp_path, "bad.graph", text)
        with pytest.raises(InstanceFormatError) as info:
            read_graph(path)
        assert info.value.line == line
        assert info.value.path == path
        assert f":{line}:" in str(info.value)

    def test_edge_count_mismatch(self, tmp_path):
        with pytest.raises(InstanceFormatError, match="announces 3 edges"):
            read_graph(write(tmp_path, "g.graph", "n 2 m 3\na b\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(InstanceFormatError, match="empty"):
            read_graph(write(tmp_path, "g.graph", "# nothing\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_graph(str(tmp_path / "absent.graph"))


class TestOtherFormats:
    def test_jobs(self, instances_dir, tmp_path):
        jobs = read_jobs(fixture(instances_dir, "jobs.txt"))
        assert [j.name for j in jobs] == ["j1", "j2", "j3", "j4", "j5"]
        assert jobs[2].first == (1, 2)
        assert jobs[2].second == (2, 3)
        one_sided = read_jobs(write(tmp_path, "j.txt", "a 1 2\nb 2 4 1 1\n"))
        first, second = jobs_to_matroids(one_sided)
        assert second.intervals[0] == (1, 4)
        assert first.full_rank() == 2

    @pytest.mark.parametrize("text", ["a 1\n", "a 3 2\n", "a 0 1\n", "a 1 1\na 2 2\n", "a x 1\n"])
    def test_bad_jobs(self, tmp_path, text):
        with pytest.raises(InstanceFormatError):
            read_jobs(write(tmp_path, "j.txt", text))

    def test_linear(self, instances_dir, tmp_path):
        a = read_linear(fixture(instances_dir, "gf2_a.mat"))
        assert isinstance(a, Linear)
        assert a.ground_size == 5
        assert a.full_rank() == 3
        # row 2 is the sum of rows 0 and 1
        assert a.rank([0, 1, 2]) == 2
        q = read_linear(write(tmp_path, "q.mat", "field Q\n1 0\n0 1\n1 1\n"))
        assert q.rank([0, 1, 2]) == 2

    @pytest.mark.parametrize("text", ["", "field\n1 0\n", "matrix 2\n1 0\n", "field 2\n1 0\n1\n", "field 2\n1 x\n"])
    def test_bad_matrices(self, tmp_path, text):
        with pytest.raises(InstanceFormatError):
            read_linear(write(tmp_path, "m.mat", text))

    def test_matroid_json(self, instances_dir, tmp_path):
        m = read_matroid_json(fixture(instances_dir, "uniform_6_2.json"))
        assert isinstance(m, Uniform)
        assert m.full_rank() == 2
        g = read_matroid_json(fixture(instances_dir, "graphic_k4.json"))
        assert isinstance(g, Graphic)
        with pytest.raises(InstanceFormatError) as info:
            read_matroid_json(write(tmp_path, "bad.json", '{\n  "kind": \n}'))
        assert info.value.line == 3
        with pytest.raises(InstanceFormatError):
            read_matroid_json(write(tmp_path, "odd.json", json.dumps({"kind": "heptagon"})))


class TestReductions:
    def test_color_partition_gives_uncolored_edges_their_own_color(self, tmp_path):
        graph = read_graph(write(tmp_path, "g.graph", "n 3 m 3\na b c=red\nb c\nc a c=red\n"))
        colors = color_partition(graph)
        assert colors.full_rank() == 2
        assert colors.rank([0, 2]) == 1

    def test_bipartite_sides(self, instances_dir):
        graph = read_graph(fixture(instances_dir, "c6_bipartite.graph"))
        left, right = bipartite_sides(graph)
        assert left.full_rank() == right.full_rank() == 3
        # consecutive edges of the cycle share a vertex
        assert left.rank([0, 1]) + right.rank([0, 1]) == 3

    def test_odd_cycle_is_not_bipartite(self, instances_dir):
        graph = read_graph(fixture(instances_dir, "colorful_triangle.graph"))
        with pytest.raises(MalformedInstance):
            bipartite_sides(graph)

    def test_align_edges(self, tmp_path):
        g1 = read_graph(write(tmp_path, "a.graph", "n 2 m 2\na b id=x\na b id=y\n"))
        g2 = read_graph(write(tmp_path, "b.graph", "n 2 m 2\na b id=y\nb a id=x\n"))
        assert align_edges(g1, g2) == [1, 0]
        plain = read_graph(write(tmp_path, "c.graph", "n 2 m 2\na b\na b\n"))
        assert align_edges(g1, plain) == [0, 1]
        other = read_graph(write(tmp_path, "d.graph", "n 2 m 2\na b id=x\na b id=z\n"))
        with pytest.raises(MalformedInstance):
            align_edges(g1, other)
        short = read_graph(write(tmp_path, "e.graph", "n 2 m 1\na b\n"))
        with pytest.raises(MalformedInstance):
            align_edges(g1, short)

    def test_deadline_matroid_defaults(self, tmp_path):
        graph = read_graph(write(tmp_path, "g.graph", "n 4 m 2\na b\nb c rel=5\n"))
        days = deadline_matroid(graph)
        assert days.intervals == [(1, 3), (5, 5)]


class TestSolvers:
    @pytest.mark.parametrize("subcommand, files, params, size", [
        ("kdst", ["k4.graph"], {"k": 2}, 6),
        ("kforest", ["k4.graph"], {"k": 3}, 6),
        ("kpseudoforest", ["k4.graph"], {"k": 1}, 4),
        ("mixed", ["k4.graph"], {"f": 1, "p": 1}, 6),
        ("bipartite-matching", ["c6_bipartite.graph"], {}, 3),
        ("colorful-st", ["colorful_triangle.graph"], {}, 2),
        ("colorful-st", ["mono_triangle.graph"], {}, 1),
        ("scheduling-intersect", ["jobs.txt"], {}, 3),
        ("linear-intersect", ["gf2_a.mat", "gf2_b.mat"], {}, 2),
        ("intersect", ["graphic_k4.json", "partition_k4.json"], {}, 3),
        ("union", ["graphic_k4.json", "uniform_6_2.json"], {}, 5),
        ("kfold", ["uniform_6_2.json"], {"k": 3}, 6),
        ("forest-deadlines", ["parallel_deadlines.graph"], {}, 3),
    ])
    def test_bundled_instances(self, instances_dir, subcommand, files, params, size):
        spec = ProblemSpec(subcommand, [fixture(instances_dir, f) for f in files], **params)
        solution = solve(spec)
        assert solution.size == size
        assert solution.problem == subcommand

    def test_kdst_feasibility(self, instances_dir, tmp_path):
        solution = solve(ProblemSpec("kdst", [fixture(instances_dir, "k4.graph")], k=2))
        assert solution.feasible
        assert solution.details["target"] == 6
        assert all(len(tree) == 3 for tree in solution.classes)
        path = write(tmp_path, "p.graph", "n 3 m 2\na b\nb c\n")
        solution = solve(ProblemSpec("kdst", [path], k=2))
        assert not solution.feasible
        assert solution.size == 2

    def test_colorful_feasibility(self, instances_dir):
        assert solve(ProblemSpec("colorful-st", [fixture(instances_dir, "colorful_triangle.graph")])).feasible
        assert not solve(ProblemSpec("colorful-st", [fixture(instances_dir, "mono_triangle.graph")])).feasible

    def test_covering_and_packing_values(self, instances_dir):
        k4 = fixture(instances_dir, "k4.graph")
        arboricity = solve(ProblemSpec("arboricity", [k4]))
        assert arboricity.details["value"] == 2
        assert arboricity.size == 6
        assert solve(ProblemSpec("pseudoarboricity", [k4])).details["value"] == 2
        assert solve(ProblemSpec("tree-packing", [k4])).details["value"] == 2

    def test_forest_with_deadlines_schedule(self, instances_dir):
        solution = solve(ProblemSpec("forest-deadlines", [fixture(instances_dir, "parallel_deadlines.graph")]))
        schedule = solution.details["schedule"]
        assert sorted(entry["day"] for entry in schedule) == [1, 2, 3]
        assert {entry["edge"] for entry in schedule} == {"e2", "e3", "e4"}
        assert {entry["edge"]: entry["day"] for entry in schedule}["e2"] == 3
        assert solution.class_labels() == [["e2", "e3", "e4"]]

    def test_scheduling_assigns_both_resources(self, instances_dir):
        solution = solve(ProblemSpec("scheduling-intersect", [fixture(instances_dir, "jobs.txt")]))
        first, second = solution.details["schedules"]
        assert set(first) == set(second) == set(solution.class_labels()[0])
        assert len(set(first.values())) == len(set(second.values())) == 3

    def test_graphic_intersection(self, tmp_path):
        g1 = write(tmp_path, "a.graph", "n 3 m 3\na b id=p\nb c id=q\nc a id=r\n")
        g2 = write(tmp_path, "b.graph", "n 4 m 3\n0 1 id=p\n1 0 id=q\n2 3 id=r\n")
        solution = solve(ProblemSpec("graphic-intersect", [g1, g2]))
        assert solution.size == 2
        assert "r" in solution.class_labels()[0]

    def test_shannon(self, instances_dir, tmp_path):
        k4 = read_graph(fixture(instances_dir, "k4.graph"))
        assert solve_shannon(k4).details["winner"] == "Short"
        triangle = read_graph(fixture(instances_dir, "colorful_triangle.graph"))
        result = solve_shannon(triangle)
        assert result.details["winner"] == "Cut"
        assert result.classes == []
        assert solve_shannon(read_graph(write(tmp_path, "one.graph", "n 1 m 0\n"))).details["winner"] == "Short"

    def test_tree_packing_on_a_disconnected_graph(self, tmp_path):
        graph = read_graph(write(tmp_path, "g.graph", "n 4 m 2\na b\nc d\n"))
        solution = solve_tree_packing(graph)
        assert solution.details == {"value": 0, "disconnected": True}
        assert solution.size == 0

    def test_mixed_needs_some_class(self, instances_dir):
        graph = read_graph(fixture(instances_dir, "k4.graph"))
        with pytest.raises(InvalidArgument):
            solve_mixed(graph, 0, 0)
        with pytest.raises(InvalidArgument):
            solve_mixed(graph, -1, 2)
        assert solve_mixed(graph, 0, 1).size == 4

    @pytest.mark.parametrize("k", [0, -1, 7])
    def test_k_out_of_range(self, instances_dir, k):
        with pytest.raises(InvalidArgument):
            solve(ProblemSpec("kforest", [fixture(instances_dir, "k4.graph")], k=k))

    def test_kdst_with_more_trees_than_edges_is_infeasible(self, tmp_path):
        path = write(tmp_path, "edge.graph", "n 2 m 1\na b id=e0\n")
        solution = solve(ProblemSpec("kdst", [path], k=2))
        assert not solution.feasible
        assert solution.size == 1
        assert solution.details["target"] == 2
        assert solution.instance["k"] == 2
        with pytest.raises(InvalidArgument):
            solve(ProblemSpec("kdst", [path], k=0))

    def test_dispatch_errors(self, instances_dir):
        with pytest.raises(InvalidArgument, match="unknown problem"):
            solve(ProblemSpec("sudoku", [fixture(instances_dir, "k4.graph")]))
        with pytest.raises(InvalidArgument, match="input file"):
            solve(ProblemSpec("intersect", [fixture(instances_dir, "uniform_6_2.json")]))

    def test_verify_classes(self, k4):
        verify_classes([[0, 1, 2], [3, 4]], [[k4], [k4]])
        with pytest.raises(VerificationFailed):
            verify_classes([[0, 1, 3]], [[k4]])
        with pytest.raises(VerificationFailed):
            verify_classes([[0, 1], [1, 2]], [[k4], [k4]])
        with pytest.raises(VerificationFailed):
            verify_classes([[0], [1]], [[k4]])


class TestReports:
    def test_round_trip_and_verify(self, instances_dir, tmp_path):
        spec = ProblemSpec("kdst", [fixture(instances_dir, "k4.graph")], k=2)
        report = run(spec)
        assert report.feasible
        assert report.size == 6
        assert report.stats["total"] > 0
        path = str(tmp_path / "out" / "report.json")
        save_report(report, path)
        loaded = load_report(path)
        assert loaded == report
        assert loaded.spec().k == 2
        verify_report(loaded)

    def test_tampered_reports_fail(self, instances_dir, tmp_path):
        report = run(ProblemSpec("kdst", [fixture(instances_dir, "k4.graph")], k=2))
        wrong_size = RunReport.from_dict(dict(report.to_dict(), size=7))
        with pytest.raises(VerificationFailed):
            verify_report(wrong_size)
        shared = RunReport.from_dict(dict(report.to_dict(), classes=[report.classes[0], report.classes[0]]))
        with pytest.raises(VerificationFailed):
            verify_report(shared)

    def test_forest_deadline_report_is_rechecked(self, instances_dir):
        report = run(ProblemSpec("forest-deadlines", [fixture(instances_dir, "parallel_deadlines.graph")]))
        verify_report(report)
        moved = [dict(entry, day=1) for entry in report.details["schedule"]]
        with pytest.raises(VerificationFailed):
            verify_report(RunReport.from_dict(dict(report.to_dict(), details={"schedule": moved})))

    def test_render_text(self, instances_dir):
        report = run(ProblemSpec("forest-deadlines", [fixture(instances_dir, "parallel_deadlines.graph")]))
        text = report.render_text()
        assert "problem: forest-deadlines" in text
        assert "feasible: yes" in text
        assert "size: 3" in text
        assert "solution: e2 e3 e4" in text
        assert "day 3: e2 (a b)" in text
        assert "oracle:" in text
        assert "matroids: graphic(n=4, vertices=4), convex_transversal(n=4, slots=3)" in text
        stats = report.render_text(stats_only=True)
        assert "size:" not in stats
        assert "oracle:" in stats

    def test_multi_class_rendering(self, instances_dir):
        report = run(ProblemSpec("kdst", [fixture(instances_dir, "k4.graph")], k=2))
        # both classes use the same graphic matroid
        assert report.instance["matroids"] == [{"kind": "graphic", "n": 6, "vertices": 4}]
        text = report.render_text()
        assert "class 1:" in text and "class 2:" in text
        assert "target: 6" in text

    def test_load_report_tolerates_bad_files(self, tmp_path):
        assert load_report(str(tmp_path / "missing.json")) is None
        assert load_report(write(tmp_path, "bad.json", "{not json")) is None

    def test_save_report_failure(self, instances_dir, tmp_path):
        report = run(ProblemSpec("kpseudoforest", [fixture(instances_dir, "k4.graph")], k=1))
        blocker = write(tmp_path, "file", "")
        with pytest.raises(OSError):
            save_report(report, blocker + "/report.json")


class TestBench:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 8, 9])
    def test_trials_match_brute_force(self, seed):
        outcome = run_trial(seed, max_n=7)
        assert outcome.ok, outcome
        assert outcome.kind.startswith("intersect" if seed % 2 == 0 else ("kfold", "union"))

    def test_bench_summary(self):
        summary = run_bench(trials=8, workers=2, max_n=6, seed=10)
        assert summary.trials == 8
        assert summary.passed == 8
        assert summary.failures == []
        assert sum(summary.by_kind.values()) == 8
        assert "trials: 8, passed: 8, failed: 0" in summary.render_text()

    def test_bench_arguments(self):
        assert run_bench(trials=0).trials == 0
        with pytest.raises(InvalidArgument):
            run_bench(trials=-1)
        with pytest.raises(InvalidArgument):
            run_bench(trials=1, workers=0)
        with pytest.raises(InvalidArgument):
            run_bench(trials=1, max_n=0)
