"""Differential trials against brute force, and re-checking saved reports."""

import sys
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.apps.run_report import RunReport
from src.apps.solvers import class_checks, deadline_matroid, verify_classes, verify_schedule, verify_spanning_trees
from src.apps.instance_io import read_graph
from src.core.errors import InvalidArgument, MatroidError, VerificationFailed
from src.core.intersection import intersect
from src.core.testkit import InstanceGenerator, brute_intersection, brute_union, brute_union_general
from src.core.union import kfold_union, matroid_union
from src.utils.logger import get_logger

logger = get_logger(__name__)

UNION_KINDS = ("graphic", "partition")


@dataclass
class TrialOutcome:
    seed: int
    kind: str
    expected: int
    got: int
    oracle_ops: int
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.expected == self.got


@dataclass
class BenchSummary:
    trials: int = 0
    passed: int = 0
    oracle_ops: int = 0
    by_kind: Dict[str, int] = field(default_factory=dict)
    failures: List[TrialOutcome] = field(default_factory=list)

    def add(self, outcome: TrialOutcome) -> None:
        self.trials += 1
        self.oracle_ops += outcome.oracle_ops
        self.by_kind[outcome.kind] = self.by_kind.get(outcome.kind, 0) + 1
        if outcome.ok:
            self.passed += 1
        else:
            self.failures.append(outcome)

    def render_text(self) -> str:
        lines = [f"trials: {self.trials}, passed: {self.passed}, failed: {len(self.failures)}",
                 "kinds: " + ", ".join(f"{k}={v}" for k, v in sorted(self.by_kind.items())),
                 f"oracle ops: {self.oracle_ops}"]
        for bad in self.failures[:10]:
            reason = bad.error or f"expected {bad.expected}, got {bad.got}"
            lines.append(f"  seed {bad.seed} ({bad.kind}): {reason}")
        return "\n".join(lines)


def run_trial(seed: int, max_n: int = 12) -> TrialOutcome:
    """
    One seeded trial; even seeds test intersection, odd seeds union.

    Each trial builds its own matroids and oracles, so trials can run on
    separate threads.
    """
    gen = InstanceGenerator(seed)
    n = gen.rng.randint(1, max(1, max_n))
    try:
        if seed % 2 == 0:
            m1, m2 = gen.pair(n)
            result = intersect(m1, m2)
            expected, _ = brute_intersection(m1, m2)
            return TrialOutcome(seed, f"intersect:{m1.kind}/{m2.kind}", expected, result.size, result.stats.total)
        n = min(n, 10)
        k = gen.rng.randint(1, 3)
        kind = gen.rng.choice(UNION_KINDS)
        if gen.rng.random() < 0.5:
            m = gen.matroid(kind, n)
            result = kfold_union(m, k)
            expected, _ = brute_union(m, k)
            return TrialOutcome(seed, f"kfold:{kind}", expected, result.size, result.stats.total)
        matroids = [gen.matroid(gen.rng.choice(UNION_KINDS), n) for _ in range(k)]
        result = matroid_union(matroids)
        expected, _ = brute_union_general(matroids)
        return TrialOutcome(seed, "union:mixed", expected, result.size, result.stats.total)
    except MatroidError as e:
        logger.warning("trial %d raised %s", seed, e)
        return TrialOutcome(seed, "error", -1, -1, 0, error=f"{type(e).__name__}: {e}")


def run_bench(trials: int, workers: int = 4, max_n: int = 12, seed: int = 0) -> BenchSummary:
    """
    Run seeded differential trials across a thread pool.

    Args:
        trials: Number of trials
        workers: Thread count
        max_n: Largest ground set a trial may draw
        seed: First seed; trial i uses seed + i

    Returns:
        BenchSummary over all trials
    """
    if trials < 0 or workers < 1 or max_n < 1:
        raise InvalidArgument("trials must be >= 0, workers and max-n >= 1")
    summary = BenchSummary()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for outcome in pool.map(lambda s: run_trial(s, max_n), range(seed, seed + trials)):
            summary.add(outcome)
    logger.info("bench: %d/%d trials passed", summary.passed, summary.trials)
    return summary


def verify_report(report: RunReport) -> None:
    """
    Re-check a saved report against its instance files.

    Raises VerificationFailed when a class is dependent, two classes share
    an element, the size disagrees with the classes, or a claimed spanning
    tree or schedule does not hold.
    """
    spec = report.spec()
    size = sum(len(c) for c in report.classes)
    if size != report.size:
        raise VerificationFailed(f"report claims size {report.size} but its classes hold {size}")
    verify_classes(report.classes, class_checks(spec, len(report.classes)))
    if report.problem in ("kdst", "shannon", "colorful-st", "tree-packing") and report.feasible and report.classes:
        graph = read_graph(spec.inputs[0])
        verify_spanning_trees(graph.graphic(), report.classes)
    if report.problem == "forest-deadlines":
        graph = read_graph(spec.inputs[0])
        days = deadline_matroid(graph)
        index = {label: i for i, label in enumerate(graph.edge_labels)}
        schedule = {index[e["edge"]]: e["day"] for e in report.details.get("schedule", [])}
        verify_schedule(days, schedule, report.classes[0] if report.classes else [])
    logger.info("report for %s verified", report.problem)
