"""Graph and scheduling problems reduced to matroid intersection and union.

Every solver returns a Solution whose classes have been re-checked with
plain rank calls on the matroids (never through the solver's oracles)
before it is handed back.
"""

import math
import sys
import os
from dataclasses import dataclass, field
from itertools import chain
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.apps.instance_io import (
    GraphInstance,
    align_edges,
    bipartite_sides,
    color_partition,
    jobs_to_matroids,
    read_graph,
    read_jobs,
    read_linear,
    read_matroid_json,
)
from src.core.errors import InvalidArgument, VerificationFailed
from src.core.intersection import PhaseRecord, intersect
from src.core.matroids import ConvexTransversal, Graphic, Matroid
from src.core.oracle import OracleStats
from src.core.union import UnionResult, covering, kfold_union, matroid_union, packing
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class ProblemSpec:
    """One CLI invocation: which problem, which files, which parameters."""

    subcommand: str
    inputs: List[str]
    k: int = 2
    f: int = 1
    p: int = 1
    epsilon: Optional[float] = None
    seed: int = 0
    stats_only: bool = False

    def params(self) -> Dict[str, Any]:
        return {"k": self.k, "f": self.f, "p": self.p, "epsilon": self.epsilon, "seed": self.seed}


@dataclass
class Solution:
    problem: str
    feasible: bool
    classes: List[List[int]]
    labels: List[str]
    instance: Dict[str, Any]
    details: Dict[str, Any] = field(default_factory=dict)
    phases: List[PhaseRecord] = field(default_factory=list)
    path_lengths: List[int] = field(default_factory=list)
    stats: OracleStats = field(default_factory=OracleStats)
    approximate: bool = False

    @property
    def elements(self) -> List[int]:
        return sorted(chain.from_iterable(self.classes))

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.classes)

    def class_labels(self) -> List[List[str]]:
        return [[str(self.labels[x]) for x in sorted(c)] for c in self.classes]


# ----------------------------------------------------------------------
# Re-verification


def verify_classes(classes: Sequence[Sequence[int]], checks: Sequence[Sequence[Matroid]]) -> None:
    """
    Raise VerificationFailed unless the classes are pairwise disjoint and
    class i is independent in every matroid of checks[i].
    """
    if len(classes) > len(checks):
        raise VerificationFailed(f"{len(classes)} classes but only {len(checks)} matroids")
    seen: Dict[int, int] = {}
    for i, cls in enumerate(classes):
        for x in cls:
            if x in seen:
                raise VerificationFailed(f"element {x} appears in classes {seen[x]} and {i}")
            seen[x] = i
        for m in checks[i]:
            if not m.is_independent(cls):
                raise VerificationFailed(f"class {i} is dependent in a {m.kind} matroid")


def verify_spanning_trees(graphic: Graphic, trees: Sequence[Sequence[int]]) -> None:
    target = max(graphic.num_vertices - 1, 0)
    for i, tree in enumerate(trees):
        if len(tree) != target or graphic.rank_of(tree) != target:
            raise VerificationFailed(f"tree {i} does not span all {graphic.num_vertices} vertices")


def verify_schedule(transversal: ConvexTransversal, schedule: Dict[int, int], elements: Sequence[int]) -> None:
    if set(schedule) != set(elements):
        raise VerificationFailed("schedule does not cover the solution")
    if len(set(schedule.values())) != len(schedule):
        raise VerificationFailed("two elements share a slot")
    for x, slot in schedule.items():
        start, end = transversal.intervals[x]
        if not start <= slot <= end:
            raise VerificationFailed(f"element {x} scheduled at {slot} outside [{start}, {end}]")


# ----------------------------------------------------------------------
# Shared reductions


def _describe(matroids: Sequence[Matroid]) -> List[Dict[str, Any]]:
    """Parameters of each distinct matroid, in order of first use."""
    seen: Dict[int, Matroid] = {}
    for m in matroids:
        seen.setdefault(id(m), m)
    return [m.describe() for m in seen.values()]


def _from_intersection(problem: str, m1: Matroid, m2: Matroid, epsilon: Optional[float],
                       instance: Dict[str, Any]) -> Solution:
    result = intersect(m1, m2, epsilon=epsilon)
    verify_classes([result.solution], [[m1, m2]])
    instance = dict(instance, n=m1.ground_size, r=result.rank_bound, matroids=_describe([m1, m2]))
    solution = Solution(
        problem=problem,
        feasible=True,
        classes=[result.solution],
        labels=[str(label) for label in m1.labels],
        instance=instance,
        phases=result.phases,
        path_lengths=result.path_lengths,
        stats=result.stats,
        approximate=result.approximate,
    )
    if result.approximate:
        solution.details["guarantee"] = f"|S| >= (1 - O({epsilon})) * r"
        solution.details["final_distance"] = result.final_distance
    return solution


def _from_union(problem: str, matroids: Sequence[Matroid], result: UnionResult,
                instance: Dict[str, Any]) -> Solution:
    verify_classes(result.classes, [[m] for m in matroids])
    instance = dict(instance, n=matroids[0].ground_size, r=result.rank_bound, k=len(matroids),
                    matroids=_describe(matroids))
    return Solution(
        problem=problem,
        feasible=True,
        classes=result.classes,
        labels=[str(label) for label in matroids[0].labels],
        instance=instance,
        phases=result.phases,
        path_lengths=result.path_lengths,
        stats=result.stats,
    )


def _check_k(k: int, n: Optional[int]) -> None:
    if k < 1:
        raise InvalidArgument(f"k must be at least 1, got {k}")
    if n is not None and k > max(n, 1):
        raise InvalidArgument(f"k = {k} exceeds the ground set size {n}")


# ----------------------------------------------------------------------
# Generic matroid problems


def solve_intersect(m1: Matroid, m2: Matroid, epsilon: Optional[float] = None) -> Solution:
    return _from_intersection("intersect", m1, m2, epsilon, {})


def solve_union(matroids: Sequence[Matroid]) -> Solution:
    return _from_union("union", matroids, matroid_union(matroids), {})


def solve_kfold(matroid: Matroid, k: int) -> Solution:
    _check_k(k, matroid.ground_size)
    return _from_union("kfold", [matroid] * k, kfold_union(matroid, k), {})


# ----------------------------------------------------------------------
# Spanning trees, forests, pseudoforests


def solve_kdst(graph: GraphInstance, k: int) -> Solution:
    """
    k edge-disjoint spanning trees, or the largest k forests when they do
    not exist.

    Asking for more trees than there are edges is answered as infeasible
    rather than rejected; only min(k, |E|) forests are built then.
    """
    m = graph.graphic()
    _check_k(k, None)
    classes = min(k, max(m.ground_size, 1))
    result = kfold_union(m, classes)
    solution = _from_union("kdst", [m] * classes, result, graph.summary())
    solution.instance["k"] = k
    target = k * max(graph.num_vertices - 1, 0)
    solution.feasible = result.size == target
    solution.details["target"] = target
    if solution.feasible:
        verify_spanning_trees(m, result.classes)
        logger.info("found %d edge-disjoint spanning trees", k)
    else:
        logger.info("no %d edge-disjoint spanning trees: union size %d < %d", k, result.size, target)
    return solution


def solve_kforest(graph: GraphInstance, k: int) -> Solution:
    m = graph.graphic()
    _check_k(k, m.ground_size)
    return _from_union("kforest", [m] * k, kfold_union(m, k), graph.summary())


def solve_kpseudoforest(graph: GraphInstance, k: int) -> Solution:
    m = graph.bicircular()
    _check_k(k, m.ground_size)
    return _from_union("kpseudoforest", [m] * k, kfold_union(m, k), graph.summary())


def solve_mixed(graph: GraphInstance, f: int, p: int) -> Solution:
    """f forests plus p pseudoforests of largest total size."""
    if f < 0 or p < 0 or f + p < 1:
        raise InvalidArgument(f"need f, p >= 0 and f + p >= 1, got f={f}, p={p}")
    graphic, bicircular = graph.graphic(), graph.bicircular()
    matroids = [graphic] * f + [bicircular] * p
    solution = _from_union("mixed", matroids, matroid_union(matroids), graph.summary())
    solution.details.update(forests=f, pseudoforests=p)
    return solution


def _from_covering(problem: str, matroid: Matroid, upper_bound: Optional[int],
                   instance: Dict[str, Any]) -> Solution:
    result = covering(matroid, upper_bound=upper_bound)
    verify_classes(result.partition, [[matroid]] * len(result.partition))
    if sum(len(c) for c in result.partition) != matroid.ground_size:
        raise VerificationFailed("covering partition misses some elements")
    return Solution(
        problem=problem,
        feasible=True,
        classes=result.partition,
        labels=[str(label) for label in matroid.labels],
        instance=dict(instance, n=matroid.ground_size, r=matroid.full_rank(), matroids=_describe([matroid])),
        details={"value": result.alpha, "probes": result.probes},
        stats=result.stats,
    )


def solve_arboricity(graph: GraphInstance) -> Solution:
    # ceil(sqrt(m)) bounds the arboricity of simple graphs; covering falls
    # back to doubling when a multigraph exceeds it
    bound = max(1, math.isqrt(max(graph.num_edges - 1, 0)) + 1)
    return _from_covering("arboricity", graph.graphic(), bound, graph.summary())


def solve_pseudoarboricity(graph: GraphInstance) -> Solution:
    bound = max(1, math.isqrt(max(graph.num_edges - 1, 0)) + 1)
    return _from_covering("pseudoarboricity", graph.bicircular(), bound, graph.summary())


def solve_tree_packing(graph: GraphInstance) -> Solution:
    """Largest number of edge-disjoint spanning trees (the strength of the graph)."""
    m = graph.graphic()
    instance = dict(graph.summary(), n=m.ground_size, r=m.full_rank(), matroids=_describe([m]))
    if not graph.is_connected():
        logger.info("graph is disconnected, so it packs no spanning tree")
        return Solution(problem="tree-packing", feasible=True, classes=[],
                        labels=[str(label) for label in m.labels], instance=instance,
                        details={"value": 0, "disconnected": True})
    result = packing(m)
    verify_classes(result.bases, [[m]] * len(result.bases))
    verify_spanning_trees(m, result.bases)
    return Solution(problem="tree-packing", feasible=True, classes=result.bases,
                    labels=[str(label) for label in m.labels], instance=instance,
                    details={"value": result.k, "probes": result.probes}, stats=result.stats)


def solve_shannon(graph: GraphInstance) -> Solution:
    """
    Shannon switching game on the whole graph.

    Short wins exactly when the graph has two edge-disjoint spanning
    trees; those trees are the certificate.
    """
    if graph.num_edges < 2:
        m = graph.graphic()
        instance = dict(graph.summary(), n=m.ground_size, r=m.full_rank())
        short = graph.num_vertices <= 1
        return Solution(problem="shannon", feasible=short, classes=[],
                        labels=[str(label) for label in m.labels], instance=instance,
                        details={"winner": "Short" if short else "Cut"})
    solution = solve_kdst(graph, 2)
    solution.problem = "shannon"
    solution.details["winner"] = "Short" if solution.feasible else "Cut"
    if not solution.feasible:
        solution.classes = []
    return solution


# ----------------------------------------------------------------------
# Intersection problems


def solve_colorful_st(graph: GraphInstance, epsilon: Optional[float] = None) -> Solution:
    """Spanning tree with pairwise distinct edge colors."""
    graphic, colors = graph.graphic(), color_partition(graph)
    solution = _from_intersection("colorful-st", graphic, colors, epsilon, graph.summary())
    target = max(graph.num_vertices - 1, 0)
    solution.feasible = solution.size == target
    solution.details["target"] = target
    if solution.feasible:
        verify_spanning_trees(graphic, solution.classes)
    return solution


def graphic_pair(g1: GraphInstance, g2: GraphInstance) -> Tuple[Graphic, Graphic]:
    """Graphic matroids of g1 and g2 over the edges of g1."""
    order = align_edges(g1, g2)
    m2 = Graphic(g2.num_vertices, [g2.edges[i] for i in order], labels=g1.edge_labels)
    return g1.graphic(), m2


def solve_graphic_intersection(g1: GraphInstance, g2: GraphInstance,
                               epsilon: Optional[float] = None) -> Solution:
    """Largest edge set that is a forest in g1 and whose image is a forest in g2."""
    m1, m2 = graphic_pair(g1, g2)
    instance = {"vertices": [g1.num_vertices, g2.num_vertices], "edges": g1.num_edges}
    return _from_intersection("graphic-intersect", m1, m2, epsilon, instance)


def solve_bipartite_matching(graph: GraphInstance, epsilon: Optional[float] = None) -> Solution:
    left, right = bipartite_sides(graph)
    solution = _from_intersection("bipartite-matching", left, right, epsilon, graph.summary())
    used = set()
    for x in solution.elements:
        for v in graph.edges[x]:
            if v in used:
                raise VerificationFailed(f"vertex {graph.vertex_labels[v]} matched twice")
            used.add(v)
    return solution


def solve_scheduling_intersection(jobs: Sequence, epsilon: Optional[float] = None) -> Solution:
    """Jobs that can be placed on both resources at once, with both slot assignments."""
    first, second = jobs_to_matroids(list(jobs))
    solution = _from_intersection("scheduling-intersect", first, second, epsilon, {"jobs": len(jobs)})
    chosen = solution.elements
    schedules = []
    for m in (first, second):
        schedule = m.matching(chosen)
        verify_schedule(m, schedule, chosen)
        schedules.append({str(m.labels[x]): slot for x, slot in sorted(schedule.items(), key=lambda kv: kv[1])})
    solution.details["schedules"] = schedules
    return solution


def solve_linear_intersection(a: Matroid, b: Matroid, epsilon: Optional[float] = None) -> Solution:
    return _from_intersection("linear-intersect", a, b, epsilon, {})


def deadline_matroid(graph: GraphInstance) -> ConvexTransversal:
    """
    Edge e may take any day in [release(e), deadline(e)].

    Edges without a deadline may take any day up to |V| - 1 (or their
    release day, if later).
    """
    horizon = max(graph.num_vertices - 1, 1)
    intervals = [(rel, dl if dl is not None else max(horizon, rel))
                 for rel, dl in zip(graph.release, graph.deadline)]
    return ConvexTransversal(intervals, labels=graph.edge_labels)


def solve_forest_deadlines(graph: GraphInstance, epsilon: Optional[float] = None) -> Solution:
    """Largest forest built one edge per day, each edge on a day it is available."""
    days = deadline_matroid(graph)
    graphic = graph.graphic()
    solution = _from_intersection("forest-deadlines", graphic, days, epsilon, graph.summary())
    schedule = days.matching(solution.elements)
    verify_schedule(days, schedule, solution.elements)
    solution.details["schedule"] = [
        {"day": day, "edge": str(graph.edge_labels[x]),
         "endpoints": [graph.vertex_labels[v] for v in graph.edges[x]]}
        for x, day in sorted(schedule.items(), key=lambda kv: kv[1])
    ]
    return solution


# Dispatch from a ProblemSpec


def _arity(spec: ProblemSpec, lo: int, hi: Optional[int] = None) -> None:
    """Check the number of input files; hi=-1 means no upper limit."""
    hi = lo if hi is None else hi
    count = len(spec.inputs)
    if count < lo or (hi >= 0 and count > hi):
        if lo == hi:
            want = str(lo)
        elif hi < 0:
            want = f"at least {lo}"
        else:
            want = f"{lo} to {hi}"
        raise InvalidArgument(f"{spec.subcommand} takes {want} input file(s), got {count}")


def _graph(spec: ProblemSpec) -> GraphInstance:
    _arity(spec, 1)
    return read_graph(spec.inputs[0])


def _matroid_pair(spec: ProblemSpec) -> List[Matroid]:
    """Both matroids of an intersection problem, as its solver builds them."""
    name = spec.subcommand
    if name == "intersect":
        _arity(spec, 2)
        return [read_matroid_json(p) for p in spec.inputs]
    if name == "linear-intersect":
        _arity(spec, 2)
        return [read_linear(p) for p in spec.inputs]
    if name == "graphic-intersect":
        _arity(spec, 2)
        return list(graphic_pair(read_graph(spec.inputs[0]), read_graph(spec.inputs[1])))
    if name == "scheduling-intersect":
        _arity(spec, 1)
        return list(jobs_to_matroids(read_jobs(spec.inputs[0])))
    graph = _graph(spec)
    if name == "colorful-st":
        return [graph.graphic(), color_partition(graph)]
    if name == "bipartite-matching":
        return list(bipartite_sides(graph))
    return [graph.graphic(), deadline_matroid(graph)]


INTERSECTION_PROBLEMS = ("intersect", "linear-intersect", "graphic-intersect", "colorful-st",
                         "bipartite-matching", "scheduling-intersect", "forest-deadlines")


def solve(spec: ProblemSpec) -> Solution:
    """Run the solver for spec.subcommand."""
    name = spec.subcommand
    logger.debug("solving %s on %s", name, spec.inputs)
    if name == "intersect":
        m1, m2 = _matroid_pair(spec)
        return solve_intersect(m1, m2, spec.epsilon)
    if name == "linear-intersect":
        a, b = _matroid_pair(spec)
        return solve_linear_intersection(a, b, spec.epsilon)
    if name == "graphic-intersect":
        _arity(spec, 2)
        return solve_graphic_intersection(read_graph(spec.inputs[0]), read_graph(spec.inputs[1]), spec.epsilon)
    if name == "scheduling-intersect":
        _arity(spec, 1)
        return solve_scheduling_intersection(read_jobs(spec.inputs[0]), spec.epsilon)
    if name == "union":
        _arity(spec, 1, -1)
        return solve_union([read_matroid_json(p) for p in spec.inputs])
    if name == "kfold":
        _arity(spec, 1)
        return solve_kfold(read_matroid_json(spec.inputs[0]), spec.k)

    graph_solvers: Dict[str, Callable[[GraphInstance], Solution]] = {
        "kdst": lambda g: solve_kdst(g, spec.k),
        "kforest": lambda g: solve_kforest(g, spec.k),
        "kpseudoforest": lambda g: solve_kpseudoforest(g, spec.k),
        "mixed": lambda g: solve_mixed(g, spec.f, spec.p),
        "arboricity": solve_arboricity,
        "pseudoarboricity": solve_pseudoarboricity,
        "tree-packing": solve_tree_packing,
        "shannon": solve_shannon,
        "colorful-st": lambda g: solve_colorful_st(g, spec.epsilon),
        "bipartite-matching": lambda g: solve_bipartite_matching(g, spec.epsilon),
        "forest-deadlines": lambda g: solve_forest_deadlines(g, spec.epsilon),
    }
    if name not in graph_solvers:
        raise InvalidArgument(f"unknown problem {name!r}")
    return graph_solvers[name](_graph(spec))


def class_checks(spec: ProblemSpec, num_classes: int) -> List[List[Matroid]]:
    """
    For each reported class, the matroids it must be independent in.

    Used to re-check a saved report against freshly loaded instance files.
    """
    name = spec.subcommand
    if name in INTERSECTION_PROBLEMS:
        return [_matroid_pair(spec)] * num_classes
    if name == "union":
        return [[read_matroid_json(p)] for p in spec.inputs]
    if name == "kfold":
        _arity(spec, 1)
        return [[read_matroid_json(spec.inputs[0])]] * num_classes
    if name == "mixed":
        graph = _graph(spec)
        return [[graph.graphic()]] * spec.f + [[graph.bicircular()]] * spec.p
    if name in ("kpseudoforest", "pseudoarboricity"):
        return [[_graph(spec).bicircular()]] * num_classes
    if name in ("kdst", "kforest", "arboricity", "tree-packing", "shannon"):
        return [[_graph(spec).graphic()]] * num_classes
    raise InvalidArgument(f"unknown problem {name!r}")
