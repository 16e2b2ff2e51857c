"""Run reports: what was solved, the answer, and what it cost."""

import time
import sys
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import psutil

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.apps.solvers import ProblemSpec, Solution, solve
from src.utils.helpers import load_json_safe, save_json_atomic
from src.utils.logger import get_logger

logger = get_logger(__name__)

REPORT_VERSION = 1


@dataclass
class RunReport:
    problem: str
    inputs: List[str]
    params: Dict[str, Any]
    instance: Dict[str, Any]
    feasible: bool
    size: int
    classes: List[List[int]]
    class_labels: List[List[str]]
    details: Dict[str, Any] = field(default_factory=dict)
    stats: Dict[str, int] = field(default_factory=dict)
    phases: List[Dict[str, int]] = field(default_factory=list)
    path_lengths: List[int] = field(default_factory=list)
    approximate: bool = False
    wall_time: float = 0.0
    rss_mb: float = 0.0
    version: int = REPORT_VERSION

    @classmethod
    def from_solution(cls, spec: ProblemSpec, solution: Solution, wall_time: float = 0.0) -> "RunReport":
        return cls(
            problem=solution.problem,
            inputs=list(spec.inputs),
            params=spec.params(),
            instance=solution.instance,
            feasible=solution.feasible,
            size=solution.size,
            classes=[sorted(c) for c in solution.classes],
            class_labels=solution.class_labels(),
            details=solution.details,
            stats=solution.stats.to_dict(),
            phases=[{"d_t": p.d_t, "augmentations": p.augmentations, "rebuilds": p.rebuilds}
                    for p in solution.phases],
            path_lengths=list(solution.path_lengths),
            approximate=solution.approximate,
            wall_time=wall_time,
            rss_mb=_rss_mb(),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def spec(self) -> ProblemSpec:
        """The ProblemSpec that produced this report."""
        params = {k: v for k, v in self.params.items() if k in ("k", "f", "p", "epsilon", "seed")}
        return ProblemSpec(subcommand=self.problem, inputs=list(self.inputs), **params)

    def render_text(self, stats_only: bool = False) -> str:
        """Human-readable report for standard output."""
        lines = [f"problem: {self.problem}"]
        summary = ", ".join(f"{k}={v}" for k, v in self.instance.items() if k != "matroids")
        if summary:
            lines.append(f"instance: {summary}")
        described = self.instance.get("matroids", [])
        if described:
            lines.append("matroids: " + ", ".join(_format_matroid(d) for d in described))
        if not stats_only:
            lines.append(f"feasible: {'yes' if self.feasible else 'no'}")
            lines.append(f"size: {self.size}")
            for key in ("value", "winner", "target"):
                if key in self.details:
                    lines.append(f"{key}: {self.details[key]}")
            if self.approximate:
                lines.append(f"approximate: {self.details.get('guarantee', '')}")
            if len(self.class_labels) == 1:
                lines.append("solution: " + " ".join(self.class_labels[0]))
            else:
                for i, labels in enumerate(self.class_labels, start=1):
                    lines.append(f"class {i}: " + " ".join(labels))
            for entry in self.details.get("schedule", []):
                lines.append(f"day {entry['day']}: {entry['edge']} ({' '.join(entry['endpoints'])})")
            for i, schedule in enumerate(self.details.get("schedules", []), start=1):
                lines.append(f"resource {i}: " + " ".join(f"{job}@{slot}" for job, slot in schedule.items()))
        ops = self.stats
        lines.append(
            f"oracle: {ops.get('total', 0)} ops "
            f"({ops.get('inserts', 0)} inserts, {ops.get('deletes', 0)} deletes, "
            f"{ops.get('rank_queries', 0)} queries)"
        )
        if self.phases:
            trace = " ".join(f"{p['d_t']}:{p['augmentations']}" for p in self.phases)
            lines.append(f"phases (d_t:augmentations): {trace}")
        if self.path_lengths:
            lines.append(f"single augmentations: {len(self.path_lengths)}")
        lines.append(f"time: {self.wall_time:.3f}s, rss: {self.rss_mb:.1f} MB")
        return "\n".join(lines)


def _format_matroid(described: Dict[str, Any]) -> str:
    params = ", ".join(f"{k}={v}" for k, v in described.items() if k != "kind")
    return f"{described.get('kind', '?')}({params})"


def _rss_mb() -> float:
    try:
        return psutil.Process().memory_info().rss / (1024 ** 2)
    except (psutil.NoSuchProcess, psutil.AccessDenied):
        return 0.0


def run(spec: ProblemSpec) -> RunReport:
    """Solve spec and wrap the answer with timing and memory."""
    start = time.perf_counter()
    solution = solve(spec)
    elapsed = time.perf_counter() - start
    logger.info("%s solved in %.3fs", spec.subcommand, elapsed)
    return RunReport.from_solution(spec, solution, elapsed)


def save_report(report: RunReport, path: str) -> None:
    if not save_json_atomic(path, report.to_dict()):
        raise OSError(f"could not write report to {path}")


def load_report(path: str) -> Optional[RunReport]:
    data = load_json_safe(path)
    if data is None:
        return None
    return RunReport.from_dict(data)
