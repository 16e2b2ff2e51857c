"""Brute-force references and seeded instance generators.

Everything here works straight on the backends' rank functions and never
touches an oracle, so it can check the solvers' answers independently.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import os
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.dynamic_basis import greedy_basis as _greedy_basis
from src.core.errors import GroundSetMismatch, GroundSetTooLarge, MalformedInstance
from src.core.exchange_bst import SINK, SOURCE
from src.core.matroids import (
    Bicircular,
    ConvexTransversal,
    Explicit,
    GammoidPair,
    Graphic,
    Linear,
    Matroid,
    Partition,
    SimpleScheduling,
    Uniform,
    gammoid_from_bipartite,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

BRUTE_LIMIT = 20
AXIOM_LIMIT = 12
NASH_WILLIAMS_LIMIT = 16


def _check_size(n: int, limit: int = BRUTE_LIMIT) -> None:
    if n > limit:
        raise GroundSetTooLarge(n, limit)


def _independent(m: Matroid, elements: Set[int]) -> bool:
    return m.rank(elements) == len(elements)


# ----------------------------------------------------------------------
# Exhaustive optima


def brute_intersection(m1: Matroid, m2: Matroid) -> Tuple[int, List[int]]:
    """
    Largest common independent set by depth-first extension.

    Common independent sets are closed downwards, so every one of them is
    reached by adding elements in increasing order.

    Returns:
        (size, witness)
    """
    if m1.ground_size != m2.ground_size:
        raise GroundSetMismatch(f"ground sets of size {m1.ground_size} and {m2.ground_size}")
    n = m1.ground_size
    _check_size(n)
    bound = min(m1.rank(range(n)), m2.rank(range(n)))
    best: List[int] = []

    def extend(start: int, current: List[int]) -> bool:
        nonlocal best
        if len(current) > len(best):
            best = list(current)
            if len(best) == bound:
                return True
        for x in range(start, n):
            if len(current) + (n - x) <= len(best):
                return False
            candidate = set(current) | {x}
            if _independent(m1, candidate) and _independent(m2, candidate):
                current.append(x)
                if extend(x + 1, current):
                    return True
                current.pop()
        return False

    extend(0, [])
    return len(best), sorted(best)


def brute_union_general(matroids: Sequence[Matroid]) -> Tuple[int, List[List[int]]]:
    """
    Largest union of independent sets, one per matroid, by exhaustive colouring.

    Returns:
        (size, classes)
    """
    if not matroids:
        return 0, []
    sizes = {m.ground_size for m in matroids}
    if len(sizes) != 1:
        raise GroundSetMismatch(f"ground sets of sizes {sorted(sizes)}")
    n = sizes.pop()
    _check_size(n)
    k = len(matroids)
    identical = all(m is matroids[0] for m in matroids)
    bound = min(n, sum(m.rank(range(n)) for m in matroids))
    classes: List[Set[int]] = [set() for _ in range(k)]
    best_size = 0
    best: List[List[int]] = [[] for _ in range(k)]

    def place(x: int, size: int) -> bool:
        nonlocal best_size, best
        if size > best_size:
            best_size = size
            best = [sorted(c) for c in classes]
            if best_size == bound:
                return True
        if x == n or size + (n - x) <= best_size:
            return False
        seen_empty = False
        for i in range(k):
            if identical and not classes[i]:
                # identical matroids: empty classes are interchangeable
                if seen_empty:
                    continue
                seen_empty = True
            classes[i].add(x)
            if _independent(matroids[i], classes[i]) and place(x + 1, size + 1):
                return True
            classes[i].discard(x)
        return place(x + 1, size)

    place(0, 0)
    return best_size, best


def brute_union(matroid: Matroid, k: int) -> Tuple[int, List[List[int]]]:
    return brute_union_general([matroid] * k)


# ----------------------------------------------------------------------
# Exchange graphs


def exchange_graph_explicit(m1: Matroid, m2: Matroid, S: Iterable[int]) -> nx.DiGraph:
    """
    Every arc of G(S), found by direct independence tests.

    Nodes are element ids plus SOURCE and SINK.
    """
    n = m1.ground_size
    _check_size(n)
    S = set(S)
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_nodes_from((SOURCE, SINK))
    outside = [x for x in range(n) if x not in S]
    for x in outside:
        if _independent(m1, S | {x}):
            g.add_edge(SOURCE, x)
        if _independent(m2, S | {x}):
            g.add_edge(x, SINK)
    for y in S:
        for x in outside:
            swapped = (S - {y}) | {x}
            if _independent(m1, swapped):
                g.add_edge(y, x)
            if _independent(m2, swapped):
                g.add_edge(x, y)
    return g


def explicit_distances(m1: Matroid, m2: Matroid, S: Iterable[int]) -> Dict[int, int]:
    """BFS distances from SOURCE in the explicit exchange graph."""
    g = exchange_graph_explicit(m1, m2, S)
    return dict(nx.single_source_shortest_path_length(g, SOURCE))


def shortest_path_elements(m1: Matroid, m2: Matroid, S: Iterable[int]) -> Optional[List[int]]:
    """Elements of one shortest s-t path of G(S), or None when S is maximum."""
    g = exchange_graph_explicit(m1, m2, S)
    try:
        path = nx.shortest_path(g, SOURCE, SINK)
    except nx.NetworkXNoPath:
        return None
    return path[1:-1]


def check_augmenting_set(m1: Matroid, m2: Matroid, S: Iterable[int], sets: Sequence[Iterable[int]],
                         layers: Optional[Sequence[Iterable[int]]] = None) -> List[str]:
    """
    Check the six conditions of a layered augmenting set (D_1, ..., D_{d-1}).

    Args:
        m1: First matroid
        m2: Second matroid
        S: Common independent set
        sets: D_1..D_{d-1}
        layers: Distance layers L_1..L_{d-1}; computed from the explicit
            exchange graph when omitted

    Returns:
        Names of the violated conditions (empty when all hold)
    """
    S = set(S)
    D = [set(d) for d in sets]
    failures = []
    if layers is None:
        dist = explicit_distances(m1, m2, S)
        layers = [{x for x, d in dist.items() if d == level and x >= 0} for level in range(1, len(D) + 1)]
    layers = [set(layer) for layer in layers]

    if any(not d <= layer for d, layer in zip(D, layers)):
        failures.append("layer")
    if len({len(d) for d in D}) > 1:
        failures.append("equal-size")
    if D and not _independent(m1, S | D[0]):
        failures.append("first-m1")
    if D and not _independent(m2, S | D[-1]):
        failures.append("last-m2")
    for i in range(len(D) - 1):
        level = i + 1
        if level % 2 == 0 and not _independent(m1, (S - D[i]) | D[i + 1]):
            failures.append(f"m1-exchange-{level}")
        if level % 2 == 1 and not _independent(m2, (S - D[i + 1]) | D[i]):
            failures.append(f"m2-exchange-{level}")
    return failures


# ----------------------------------------------------------------------
# Other references


def greedy_basis(matroid: Matroid, elements: Optional[Iterable[int]] = None,
                 weights: Optional[Sequence[float]] = None) -> Set[int]:
    """Min-weight basis of elements (default: the ground set) under weights or the matroid's own."""
    if elements is None:
        elements = range(matroid.ground_size)
    key = (lambda x: weights[x]) if weights is not None else None
    return _greedy_basis(matroid, elements, key)


def check_rank_axioms(matroid: Matroid) -> List[str]:
    """
    Exhaustively check r(empty) = 0, unit increase and local submodularity.

    Returns:
        Descriptions of the violations found (empty when the rank is a matroid rank)
    """
    n = matroid.ground_size
    _check_size(n, AXIOM_LIMIT)
    rank = {}
    for mask in range(1 << n):
        rank[mask] = matroid.rank([x for x in range(n) if mask >> x & 1])
    problems = []
    if rank[0] != 0:
        problems.append("rank of the empty set is not 0")
    for mask in range(1 << n):
        for x in range(n):
            if mask >> x & 1:
                continue
            gain = rank[mask | 1 << x] - rank[mask]
            if gain not in (0, 1):
                problems.append(f"adding {x} to {mask:b} changes the rank by {gain}")
            for y in range(x + 1, n):
                if mask >> y & 1:
                    continue
                if rank[mask | 1 << x] + rank[mask | 1 << y] < rank[mask | 1 << x | 1 << y] + rank[mask]:
                    problems.append(f"submodularity fails at {mask:b} with {x}, {y}")
    return problems


def nash_williams_arboricity(num_vertices: int, edges: Sequence[Tuple[int, int]]) -> int:
    """
    max over vertex subsets H of ceil(m_H / (n_H - 1)), by exhaustive scan.

    Self-loops are ignored.
    """
    _check_size(num_vertices, NASH_WILLIAMS_LIMIT)
    simple = [(u, v) for u, v in edges if u != v]
    best = 0
    for mask in range(1, 1 << num_vertices):
        size = bin(mask).count("1")
        if size < 2:
            continue
        inside = sum(1 for u, v in simple if mask >> u & 1 and mask >> v & 1)
        best = max(best, math.ceil(inside / (size - 1)))
    return best


def disjoint_path_count(graph: nx.DiGraph, a: Hashable, b: Hashable) -> int:
    """Number of internally vertex-disjoint a-b paths, by unit-capacity max-flow."""
    if a == b:
        raise MalformedInstance("endpoints must differ")
    flow = nx.DiGraph()
    for v in graph.nodes:
        cap = graph.number_of_nodes() if v in (a, b) else 1
        flow.add_edge(("in", v), ("out", v), capacity=cap)
    for u, v in graph.edges:
        flow.add_edge(("out", u), ("in", v), capacity=1)
    return int(nx.maximum_flow_value(flow, ("out", a), ("in", b)))


# ----------------------------------------------------------------------
# Generators


class InstanceGenerator:
    """
    Seeded random instances. The same seed always yields the same instances.

    Args:
        seed: Seed for the private random.Random
    """

    PAIR_KINDS = ("partition", "graphic", "scheduling", "explicit", "uniform", "transversal")

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def edges(self, num_vertices: int, num_edges: int, simple: bool = False) -> List[Tuple[int, int]]:
        if num_vertices < 2:
            return [(0, 0)] * num_edges if num_vertices == 1 and not simple else []
        if simple:
            pairs = list(itertools.combinations(range(num_vertices), 2))
            self.rng.shuffle(pairs)
            return sorted(pairs[:num_edges])
        result = []
        for _ in range(num_edges):
            u, v = self.rng.sample(range(num_vertices), 2)
            result.append((min(u, v), max(u, v)))
        return result

    def graphic(self, num_vertices: int, num_edges: int, simple: bool = False) -> Graphic:
        return Graphic(num_vertices, self.edges(num_vertices, num_edges, simple))

    def bicircular(self, num_vertices: int, num_edges: int) -> Bicircular:
        return Bicircular(num_vertices, self.edges(num_vertices, num_edges))

    def partition(self, n: int, num_colors: Optional[int] = None, max_capacity: int = 2) -> Partition:
        num_colors = num_colors or max(1, n // 2)
        colors = [self.rng.randrange(num_colors) for _ in range(n)]
        caps = {c: self.rng.randint(1, max_capacity) for c in range(num_colors)}
        return Partition(colors, caps)

    def uniform(self, n: int) -> Uniform:
        return Uniform(n, self.rng.randint(0, n))

    def scheduling(self, n: int, horizon: Optional[int] = None) -> SimpleScheduling:
        horizon = horizon or max(1, n // 2)
        return SimpleScheduling([self.rng.randint(1, horizon) for _ in range(n)])

    def transversal(self, n: int, slots: Optional[int] = None) -> ConvexTransversal:
        slots = slots or max(1, n // 2)
        intervals = []
        for _ in range(n):
            lo = self.rng.randint(1, slots)
            intervals.append((lo, self.rng.randint(lo, slots)))
        return ConvexTransversal(intervals, slots)

    def linear(self, n: int, dim: int, p: int = 2) -> Linear:
        rows = [[self.rng.randrange(p) for _ in range(dim)] for _ in range(n)]
        return Linear(rows, field=p)

    def explicit(self, n: int) -> Explicit:
        """An explicit matroid copied from a random small graphic or partition matroid."""
        source = self.graphic(max(2, n // 2 + 1), n) if self.rng.random() < 0.5 else self.partition(n)
        return Explicit.from_matroid(source)

    def matroid(self, kind: str, n: int) -> Matroid:
        if kind == "partition":
            return self.partition(n)
        if kind == "graphic":
            return self.graphic(max(2, n // 2 + 1), n)
        if kind == "bicircular":
            return self.bicircular(max(2, n // 2 + 1), n)
        if kind == "scheduling":
            return self.scheduling(n)
        if kind == "transversal":
            return self.transversal(n)
        if kind == "uniform":
            return self.uniform(n)
        if kind == "linear":
            return self.linear(n, self.rng.randint(1, max(1, n // 2)))
        if kind == "explicit":
            return self.explicit(n)
        raise MalformedInstance(f"unknown generator kind {kind!r}")

    def pair(self, n: int, kinds: Sequence[str] = PAIR_KINDS) -> Tuple[Matroid, Matroid]:
        return self.matroid(self.rng.choice(kinds), n), self.matroid(self.rng.choice(kinds), n)

    def bipartite_matching(self, left: int, right: int, num_edges: int) -> Tuple[Partition, Partition, List[Tuple[int, int]]]:
        """Two partition matroids whose common independent sets are the matchings of a random bipartite graph."""
        edges = [(self.rng.randrange(left), self.rng.randrange(right)) for _ in range(num_edges)]
        return Partition([u for u, _ in edges]), Partition([v for _, v in edges]), edges

    def bipartite_digraph(self, left: int, right: int, density: float = 0.3) -> Tuple[nx.DiGraph, str, str]:
        """
        Random directed bipartite graph with extra right vertices a (no in-arcs)
        and b (no out-arcs).
        """
        g = nx.DiGraph()
        L = [f"l{i}" for i in range(left)]
        R = [f"r{i}" for i in range(right)] + ["a", "b"]
        g.add_nodes_from(L, bipartite=0)
        g.add_nodes_from(R, bipartite=1)
        for u in L:
            for v in R:
                if v != "a" and self.rng.random() < density:
                    g.add_edge(u, v)
                if v != "b" and self.rng.random() < density:
                    g.add_edge(v, u)
        return g, "a", "b"

    def gammoid_instance(self, left: int, right: int, density: float = 0.3) -> Tuple[nx.DiGraph, GammoidPair]:
        g, a, b = self.bipartite_digraph(left, right, density)
        return g, gammoid_from_bipartite(g, a, b)
