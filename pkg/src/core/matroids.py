"""Concrete matroid kinds with rank backends."""

from __future__ import annotations

import heapq
import math
import sys
import os
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import (
    DegreePreconditionViolated,
    DuplicateWeights,
    ElementOutOfGroundSet,
    GroundSetTooLarge,
    MalformedInstance,
)
from src.core.oracle import DELETE, INSERT, DynamicRankOracle, RankBackend, RankState
from src.utils.logger import get_logger

logger = get_logger(__name__)

MERSENNE_31 = (1 << 31) - 1
# products of two residues must fit in int64
MAX_FIELD = 1 << 31
EXPLICIT_LIMIT = 16


class Matroid(RankBackend):
    """
    Base class for every matroid kind.

    Elements are the integers 0..n-1. Labels map them back to whatever the
    instance file called them; weights, when given, order them for the
    min-weight basis.
    """

    kind = "abstract"

    def __init__(self, n: int, labels: Optional[Sequence[Hashable]] = None,
                 weights: Optional[Sequence[float]] = None):
        if n < 0:
            raise MalformedInstance("ground set size must be non-negative")
        self._n = n
        self.labels: List[Hashable] = list(labels) if labels is not None else list(range(n))
        if len(self.labels) != n:
            raise MalformedInstance(f"{len(self.labels)} labels for {n} elements")
        self.weights: Optional[List[float]] = list(weights) if weights is not None else None
        if self.weights is not None and len(self.weights) != n:
            raise MalformedInstance(f"{len(self.weights)} weights for {n} elements")

    @property
    def ground_size(self) -> int:
        return self._n

    @property
    def ground_set(self) -> range:
        return range(self._n)

    def rank_of(self, elements: Iterable[int]) -> int:
        """
        Validated rank of a set of element ids.

        Args:
            elements: Element ids, each in 0..n-1

        Returns:
            Size of the largest independent subset
        """
        members = set(elements)
        for x in members:
            if not isinstance(x, (int, np.integer)) or x < 0 or x >= self._n:
                raise ElementOutOfGroundSet(x, self._n)
        return self.rank(members)

    def is_independent(self, elements: Iterable[int]) -> bool:
        members = set(elements)
        return self.rank_of(members) == len(members)

    def full_rank(self) -> int:
        return self.rank(range(self._n))

    def weight(self, x: int) -> float:
        """Tie-break key of x; the element index when no weights were given."""
        return self.weights[x] if self.weights is not None else x

    def check_weights(self) -> None:
        if self.weights is not None and len(set(self.weights)) != len(self.weights):
            raise DuplicateWeights("element weights must be pairwise distinct")

    def oracle(self, pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None) -> DynamicRankOracle:
        return DynamicRankOracle(self, pin_distance=pin_distance, max_auto_pins=max_auto_pins)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self._n})"


# ----------------------------------------------------------------------
# Uniform and partition


class _CountState(RankState):
    def __init__(self, cap: int):
        super().__init__()
        self.cap = cap

    def insert(self, x: int) -> Any:
        token = (INSERT, x, self.rank)
        self.members.add(x)
        self.rank = min(len(self.members), self.cap)
        return token

    def delete(self, x: int) -> Any:
        token = (DELETE, x, self.rank)
        self.members.discard(x)
        self.rank = min(len(self.members), self.cap)
        return token

    def undo(self, token: Any) -> None:
        kind, x, old = token
        if kind == INSERT:
            self.members.discard(x)
        else:
            self.members.add(x)
        self.rank = old

    def copy(self) -> "_CountState":
        clone = _CountState(self.cap)
        clone.members = set(self.members)
        clone.rank = self.rank
        return clone


class Uniform(Matroid):
    kind = "uniform"

    def __init__(self, n: int, r: int, **kwargs):
        super().__init__(n, **kwargs)
        if r < 0:
            raise MalformedInstance("uniform rank must be non-negative")
        self.r = r

    def rank(self, elements: Iterable[int]) -> int:
        return min(len(set(elements)), self.r)

    def new_state(self) -> RankState:
        return _CountState(self.r)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "r": self.r}


class _PartitionState(RankState):
    def __init__(self, matroid: "Partition"):
        super().__init__()
        self.matroid = matroid
        self.counts: Dict[Hashable, int] = {}

    def insert(self, x: int) -> Any:
        token = (INSERT, x, self.rank)
        c = self.matroid.colors[x]
        used = self.counts.get(c, 0)
        if used < self.matroid.capacity(c):
            self.rank += 1
        self.counts[c] = used + 1
        self.members.add(x)
        return token

    def delete(self, x: int) -> Any:
        token = (DELETE, x, self.rank)
        c = self.matroid.colors[x]
        used = self.counts[c] - 1
        self.counts[c] = used
        if used < self.matroid.capacity(c):
            self.rank -= 1
        self.members.discard(x)
        return token

    def undo(self, token: Any) -> None:
        kind, x, old = token
        c = self.matroid.colors[x]
        if kind == INSERT:
            self.counts[c] -= 1
            self.members.discard(x)
        else:
            self.counts[c] = self.counts.get(c, 0) + 1
            self.members.add(x)
        self.rank = old

    def copy(self) -> "_PartitionState":
        clone = _PartitionState(self.matroid)
        clone.members = set(self.members)
        clone.counts = dict(self.counts)
        clone.rank = self.rank
        return clone


class Partition(Matroid):
    """Each element has a color; at most capacity(color) elements of a color."""

    kind = "partition"

    def __init__(self, colors: Sequence[Hashable], capacities: Optional[Dict[Hashable, int]] = None,
                 default_capacity: int = 1, **kwargs):
        super().__init__(len(colors), **kwargs)
        self.colors = list(colors)
        self.capacities = dict(capacities or {})
        self.default_capacity = default_capacity
        for c, cap in self.capacities.items():
            if cap < 0:
                raise MalformedInstance(f"negative capacity for color {c!r}")

    def capacity(self, color: Hashable) -> int:
        return self.capacities.get(color, self.default_capacity)

    def rank(self, elements: Iterable[int]) -> int:
        counts: Dict[Hashable, int] = {}
        for x in set(elements):
            c = self.colors[x]
            counts[c] = counts.get(c, 0) + 1
        return sum(min(k, self.capacity(c)) for c, k in counts.items())

    def new_state(self) -> RankState:
        return _PartitionState(self)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "colors": len(set(self.colors))}


# ----------------------------------------------------------------------
# Graphic and bicircular


def _check_edges(num_vertices: int, edges: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    checked = []
    for i, (u, v) in enumerate(edges):
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise MalformedInstance(f"edge {i} = ({u}, {v}) has an endpoint outside 0..{num_vertices - 1}")
        checked.append((int(u), int(v)))
    return checked


class _GraphicState(RankState):
    """Union-find with rollback; rank counts successful unions."""

    def __init__(self, matroid: "Graphic"):
        super().__init__()
        self.edges = matroid.edges
        self.parent = list(range(matroid.num_vertices))
        self.size = [1] * matroid.num_vertices

    def _find(self, u: int) -> int:
        while self.parent[u] != u:
            u = self.parent[u]
        return u

    def _union(self, x: int) -> Optional[Tuple[int, int]]:
        u, v = self.edges[x]
        ru, rv = self._find(u), self._find(v)
        if ru == rv:
            return None
        if self.size[ru] < self.size[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        self.size[ru] += self.size[rv]
        self.rank += 1
        return rv, ru

    def insert(self, x: int) -> Any:
        self.members.add(x)
        return (INSERT, x, self._union(x))

    def delete(self, x: int) -> Any:
        token = (DELETE, x, (self.parent[:], self.size[:], self.rank))
        self.members.discard(x)
        self.parent = list(range(len(self.parent)))
        self.size = [1] * len(self.size)
        self.rank = 0
        for e in self.members:
            self._union(e)
        return token

    def undo(self, token: Any) -> None:
        kind, x, record = token
        if kind == INSERT:
            self.members.discard(x)
            if record is not None:
                child, root = record
                self.parent[child] = child
                self.size[root] -= self.size[child]
                self.rank -= 1
        else:
            self.members.add(x)
            self.parent, self.size, self.rank = record

    def copy(self) -> "_GraphicState":
        clone = _GraphicState.__new__(_GraphicState)
        clone.members = set(self.members)
        clone.rank = self.rank
        clone.edges = self.edges
        clone.parent = self.parent[:]
        clone.size = self.size[:]
        return clone


class Graphic(Matroid):
    """Forests of a multigraph: rank(S) = |V| - components(V, S)."""

    kind = "graphic"

    def __init__(self, num_vertices: int, edges: Sequence[Tuple[int, int]], **kwargs):
        super().__init__(len(edges), **kwargs)
        self.num_vertices = num_vertices
        self.edges = _check_edges(num_vertices, edges)

    def rank(self, elements: Iterable[int]) -> int:
        parent = list(range(self.num_vertices))

        def find(u: int) -> int:
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        rank = 0
        for x in set(elements):
            u, v = self.edges[x]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                rank += 1
        return rank

    def new_state(self) -> RankState:
        return _GraphicState(self)

    def to_networkx(self, elements: Optional[Iterable[int]] = None) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.num_vertices))
        chosen = range(self._n) if elements is None else elements
        for x in chosen:
            u, v = self.edges[x]
            g.add_edge(u, v, key=x)
        return g

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "vertices": self.num_vertices}


class _BicircularState(RankState):
    """Union-find tracking edges and vertices per component; rank adds min(edges, vertices)."""

    def __init__(self, matroid: "Bicircular"):
        super().__init__()
        self.edges = matroid.edges
        self.parent = list(range(matroid.num_vertices))
        self.size = [1] * matroid.num_vertices
        self.edge_count = [0] * matroid.num_vertices

    def _find(self, u: int) -> int:
        while self.parent[u] != u:
            u = self.parent[u]
        return u

    def _add(self, x: int) -> Tuple:
        u, v = self.edges[x]
        ru, rv = self._find(u), self._find(v)
        if ru == rv:
            before = min(self.edge_count[ru], self.size[ru])
            self.edge_count[ru] += 1
            self.rank += min(self.edge_count[ru], self.size[ru]) - before
            return ("same", ru)
        if self.size[ru] < self.size[rv]:
            ru, rv = rv, ru
        before = min(self.edge_count[ru], self.size[ru]) + min(self.edge_count[rv], self.size[rv])
        old_edges = self.edge_count[ru]
        self.parent[rv] = ru
        self.size[ru] += self.size[rv]
        self.edge_count[ru] += self.edge_count[rv] + 1
        self.rank += min(self.edge_count[ru], self.size[ru]) - before
        return ("merge", rv, ru, old_edges)

    def insert(self, x: int) -> Any:
        old = self.rank
        self.members.add(x)
        return (INSERT, x, (old, self._add(x)))

    def delete(self, x: int) -> Any:
        token = (DELETE, x, (self.parent[:], self.size[:], self.edge_count[:], self.rank))
        self.members.discard(x)
        n = len(self.parent)
        self.parent = list(range(n))
        self.size = [1] * n
        self.edge_count = [0] * n
        self.rank = 0
        for e in self.members:
            self._add(e)
        return token

    def undo(self, token: Any) -> None:
        kind, x, record = token
        if kind == INSERT:
            self.members.discard(x)
            old_rank, change = record
            if change[0] == "same":
                self.edge_count[change[1]] -= 1
            else:
                _, child, root, old_edges = change
                self.parent[child] = child
                self.size[root] -= self.size[child]
                self.edge_count[root] = old_edges
            self.rank = old_rank
        else:
            self.members.add(x)
            self.parent, self.size, self.edge_count, self.rank = record

    def copy(self) -> "_BicircularState":
        clone = _BicircularState.__new__(_BicircularState)
        clone.members = set(self.members)
        clone.rank = self.rank
        clone.edges = self.edges
        clone.parent = self.parent[:]
        clone.size = self.size[:]
        clone.edge_count = self.edge_count[:]
        return clone


class Bicircular(Matroid):
    """Pseudoforests: every component has at most one cycle."""

    kind = "bicircular"

    def __init__(self, num_vertices: int, edges: Sequence[Tuple[int, int]], **kwargs):
        super().__init__(len(edges), **kwargs)
        self.num_vertices = num_vertices
        self.edges = _check_edges(num_vertices, edges)

    def rank(self, elements: Iterable[int]) -> int:
        state = _BicircularState(self)
        for x in set(elements):
            state._add(x)
        return state.rank

    def new_state(self) -> RankState:
        return _BicircularState(self)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "vertices": self.num_vertices}


# ----------------------------------------------------------------------
# Convex transversal and scheduling


class ConvexTransversal(Matroid):
    """
    Element l can be matched to any slot in [start(l), end(l)].

    rank(S) is the maximum matching of S into slots 1..slots, found by
    sweeping slots left to right and always serving the available element
    with the earliest end.
    """

    kind = "convex_transversal"

    def __init__(self, intervals: Sequence[Tuple[int, int]], slots: Optional[int] = None, **kwargs):
        super().__init__(len(intervals), **kwargs)
        self.intervals: List[Tuple[int, int]] = []
        for i, (s, t) in enumerate(intervals):
            if s > t:
                raise MalformedInstance(f"interval {i} has start {s} > end {t}")
            if s < 1:
                raise MalformedInstance(f"interval {i} starts before slot 1")
            self.intervals.append((int(s), int(t)))
        self.slots = slots if slots is not None else max((t for _, t in self.intervals), default=0)
        if any(t > self.slots for _, t in self.intervals):
            raise MalformedInstance(f"an interval ends after slot {self.slots}")

    def matching(self, elements: Iterable[int]) -> Dict[int, int]:
        """
        Maximum matching witness.

        Returns:
            Mapping element id -> slot for every matched element
        """
        order = sorted(set(elements), key=lambda x: (self.intervals[x][0], self.intervals[x][1], x))
        result: Dict[int, int] = {}
        heap: List[Tuple[int, int]] = []
        i = 0
        slot = 0
        while i < len(order) or heap:
            if not heap:
                slot = max(slot + 1, self.intervals[order[i]][0])
            else:
                slot += 1
            while i < len(order) and self.intervals[order[i]][0] <= slot:
                x = order[i]
                heapq.heappush(heap, (self.intervals[x][1], x))
                i += 1
            while heap and heap[0][0] < slot:
                heapq.heappop(heap)
            if heap:
                _, x = heapq.heappop(heap)
                result[x] = slot
        return result

    def rank(self, elements: Iterable[int]) -> int:
        return len(self.matching(elements))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "slots": self.slots}


class SimpleScheduling(ConvexTransversal):
    """Unit jobs with deadlines: every interval starts at slot 1."""

    kind = "scheduling"

    def __init__(self, deadlines: Sequence[int], **kwargs):
        super().__init__([(1, int(d)) for d in deadlines], **kwargs)
        self.deadlines = [int(d) for d in deadlines]


# ----------------------------------------------------------------------
# Linear


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Row rank of an integer matrix over GF(p) by Gaussian elimination."""
    if matrix.size == 0:
        return 0
    a = np.array(matrix, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        pivot = rank + int(nz[0])
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        factors = a[:, c].copy()
        factors[rank] = 0
        a = (a - np.outer(factors, a[rank]) % p) % p
        rank += 1
        if rank == rows:
            break
    return rank


def rank_rational(rows: Sequence[Sequence[Fraction]]) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    rank = 0
    cols = len(a[0])
    for c in range(cols):
        pivot = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        lead = a[rank][c]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / lead
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


class Linear(Matroid):
    """Rows of a matrix; rank is the row rank over GF(p) or the rationals."""

    kind = "linear"

    def __init__(self, rows: Sequence[Sequence[Any]], field: Optional[int] = MERSENNE_31,
                 exact: bool = False, **kwargs):
        super().__init__(len(rows), **kwargs)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise MalformedInstance(f"matrix rows have different lengths {sorted(widths)}")
        self.width = widths.pop() if widths else 0
        self.exact = exact or field is None
        self.field = None if self.exact else int(field)
        if self.field is not None:
            if self.field >= MAX_FIELD:
                raise MalformedInstance(f"field size {self.field} must be below 2^31")
            if not _is_prime(self.field):
                raise MalformedInstance(f"field size {self.field} is not a prime")
        if self.exact:
            self._rows = [[Fraction(v) for v in r] for r in rows]
        else:
            self._matrix = np.array([[int(v) for v in r] for r in rows], dtype=np.int64).reshape(len(rows), self.width)

    def rank(self, elements: Iterable[int]) -> int:
        chosen = sorted(set(elements))
        if not chosen or self.width == 0:
            return 0
        if self.exact:
            return rank_rational([self._rows[x] for x in chosen])
        return rank_mod_p(self._matrix[chosen], self.field)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "width": self.width,
                "field": "rational" if self.exact else self.field}


# ----------------------------------------------------------------------
# Gammoid

_SOURCE = "__source__"
_SINK = "__sink__"


class Gammoid(Matroid):
    """
    Strict gammoid of a digraph with source set X.

    Y is independent iff vertex-disjoint paths start in X and end exactly
    at Y. The rank is a unit-capacity max-flow with every vertex split in
    two.
    """

    kind = "gammoid"

    def __init__(self, digraph: nx.DiGraph, sources: Iterable[Hashable],
                 ground: Optional[Sequence[Hashable]] = None, **kwargs):
        vertices = list(ground) if ground is not None else sorted(digraph.nodes, key=repr)
        kwargs.setdefault("labels", vertices)
        super().__init__(len(vertices), **kwargs)
        self.vertices = vertices
        self.index = {v: i for i, v in enumerate(vertices)}
        self.sources = list(sources)
        missing = [x for x in self.sources if x not in digraph]
        if missing:
            raise MalformedInstance(f"sources {missing!r} are not vertices of the digraph")
        self.digraph = digraph

        flow = nx.DiGraph()
        for v in digraph.nodes:
            flow.add_edge(("in", v), ("out", v), capacity=1)
        for u, v in digraph.edges:
            flow.add_edge(("out", u), ("in", v), capacity=1)
        for x in self.sources:
            flow.add_edge(_SOURCE, ("in", x), capacity=1)
        self._flow = flow

    def rank(self, elements: Iterable[int]) -> int:
        chosen = set(elements)
        if not chosen or not self.sources:
            return 0
        g = self._flow.copy()
        for y in chosen:
            v = self.vertices[y]
            if v not in self.digraph:
                continue
            g.add_edge(("out", v), _SINK, capacity=1)
        if _SINK not in g:
            return 0
        return int(nx.maximum_flow_value(g, _SOURCE, _SINK))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "sources": len(self.sources),
                "arcs": self.digraph.number_of_edges()}


class GammoidPair(NamedTuple):
    m1: Gammoid
    m2: Gammoid
    candidate: List[int]


def gammoid_from_bipartite(graph: nx.DiGraph, a: Hashable, b: Hashable,
                           left: Optional[Iterable[Hashable]] = None) -> GammoidPair:
    """
    Build two strict gammoids whose exchange graph at L is the given digraph.

    The left side L is taken from ``left`` or from the ``bipartite`` node
    attribute (0 for L, 1 for R). M1 lives on the L->R arcs with sources
    L + a, M2 on the reversed R->L arcs with sources L + b. The exchange
    graph of L then holds every arc of the digraph plus s->a and b->t; it
    also holds x->a and b->x for every x in L, which no simple s-t path can
    use.

    Args:
        graph: Directed bipartite graph on L and R
        a: Vertex of R with no incoming arcs
        b: Vertex of R with no outgoing arcs
        left: Optional explicit left side

    Returns:
        GammoidPair(m1, m2, candidate) where candidate holds the ids of L
    """
    if a not in graph or b not in graph:
        raise DegreePreconditionViolated("a and b must be vertices of the digraph")
    if graph.in_degree(a) != 0:
        raise DegreePreconditionViolated(f"vertex {a!r} has in-degree {graph.in_degree(a)}")
    if graph.out_degree(b) != 0:
        raise DegreePreconditionViolated(f"vertex {b!r} has out-degree {graph.out_degree(b)}")

    if left is None:
        left_set = {v for v, side in graph.nodes(data="bipartite") if side == 0}
    else:
        left_set = set(left)
    if a in left_set or b in left_set:
        raise DegreePreconditionViolated("a and b must lie on the right side")

    h1 = nx.DiGraph()
    h2 = nx.DiGraph()
    h1.add_nodes_from(graph.nodes)
    h2.add_nodes_from(graph.nodes)
    for u, v in graph.edges:
        if u in left_set and v not in left_set:
            h1.add_edge(u, v)
        elif u not in left_set and v in left_set:
            h2.add_edge(v, u)
        else:
            raise MalformedInstance(f"arc ({u!r}, {v!r}) does not cross the bipartition")

    ground = sorted(graph.nodes, key=repr)
    ordered_left = [v for v in ground if v in left_set]
    m1 = Gammoid(h1, ordered_left + [a], ground=ground)
    m2 = Gammoid(h2, ordered_left + [b], ground=ground)
    candidate = [m1.index[v] for v in ordered_left]
    return GammoidPair(m1, m2, candidate)


# ----------------------------------------------------------------------
# Explicit


class Explicit(Matroid):
    """Matroid given by the full family of independent sets (as bitmasks)."""

    kind = "explicit"

    def __init__(self, n: int, independent: Iterable[Iterable[int]], validate: bool = True, **kwargs):
        if n > EXPLICIT_LIMIT:
            raise GroundSetTooLarge(n, EXPLICIT_LIMIT)
        super().__init__(n, **kwargs)
        masks: Set[int] = set()
        for family_set in independent:
            mask = 0
            for x in family_set:
                if not 0 <= x < n:
                    raise ElementOutOfGroundSet(x, n)
                mask |= 1 << x
            masks.add(mask)
        masks.add(0)
        self.masks = sorted(masks, key=lambda m: -bin(m).count("1"))
        self._mask_set = masks
        if validate:
            self._validate()

    def _validate(self) -> None:
        for mask in self._mask_set:
            bit = mask
            while bit:
                low = bit & -bit
                if mask & ~low not in self._mask_set:
                    raise MalformedInstance(f"family is not closed under removal (mask {mask:#x})")
                bit ^= low
        # augmentation: a smaller set can grow from any larger one
        by_size: Dict[int, List[int]] = {}
        for mask in self._mask_set:
            by_size.setdefault(bin(mask).count("1"), []).append(mask)
        for small_size, smalls in by_size.items():
            larger = by_size.get(small_size + 1, [])
            for small in smalls:
                for big in larger:
                    extra = big & ~small
                    if not self._can_grow(small, extra):
                        raise MalformedInstance("family violates the exchange axiom")

    def _can_grow(self, small: int, extra: int) -> bool:
        bit = extra
        while bit:
            low = bit & -bit
            if small | low in self._mask_set:
                return True
            bit ^= low
        return False

    @classmethod
    def from_matroid(cls, matroid: Matroid) -> "Explicit":
        """Enumerate the independent sets of a small matroid."""
        n = matroid.ground_size
        if n > EXPLICIT_LIMIT:
            raise GroundSetTooLarge(n, EXPLICIT_LIMIT)
        family = []
        for size in range(n + 1):
            found = False
            for combo in combinations(range(n), size):
                if matroid.rank(combo) == size:
                    family.append(combo)
                    found = True
            if not found:
                break
        return cls(n, family, validate=False, labels=matroid.labels, weights=matroid.weights)

    def rank(self, elements: Iterable[int]) -> int:
        mask = 0
        for x in elements:
            mask |= 1 << x
        for m in self.masks:
            if m & ~mask == 0:
                return bin(m).count("1")
        return 0

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self._n, "independent_sets": len(self.masks)}


# ----------------------------------------------------------------------
# Construction from plain dicts (JSON instance files)


def matroid_from_dict(data: Dict[str, Any]) -> Matroid:
    """
    Build a matroid from a JSON-style description.

    Args:
        data: Mapping with a ``kind`` key plus kind-specific parameters

    Returns:
        The matroid instance
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise MalformedInstance("matroid description needs a 'kind' field")
    kind = str(data["kind"]).lower()
    extra = {k: data[k] for k in ("labels", "weights") if k in data}
    try:
        if kind == "uniform":
            return Uniform(int(data["n"]), int(data["r"]), **extra)
        if kind == "partition":
            caps = data.get("capacities", {})
            return Partition([str(c) for c in data["colors"]], {str(k): int(v) for k, v in caps.items()} if caps else None,
                             default_capacity=int(data.get("default_capacity", 1)), **extra)
        if kind == "graphic":
            return Graphic(int(data["vertices"]), [tuple(e) for e in data["edges"]], **extra)
        if kind == "bicircular":
            return Bicircular(int(data["vertices"]), [tuple(e) for e in data["edges"]], **extra)
        if kind in ("convex_transversal", "transversal"):
            return ConvexTransversal([tuple(iv) for iv in data["intervals"]], data.get("slots"), **extra)
        if kind in ("scheduling", "simple_scheduling"):
            return SimpleScheduling(data["deadlines"], **extra)
        if kind == "linear":
            field = data.get("field", MERSENNE_31)
            exact = field in (None, "rational", "Q")
            return Linear(data["rows"], field=None if exact else int(field), exact=exact, **extra)
        if kind == "gammoid":
            g = nx.DiGraph()
            g.add_nodes_from(data.get("vertices", []))
            g.add_edges_from(tuple(e) for e in data.get("arcs", []))
            return Gammoid(g, data["sources"], ground=data.get("ground"), **extra)
        if kind == "explicit":
            return Explicit(int(data["n"]), data["independent"], **extra)
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedInstance(f"bad {kind} description: {e}") from e
    raise MalformedInstance(f"unknown matroid kind {kind!r}")
