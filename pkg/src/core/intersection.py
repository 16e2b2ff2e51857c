"""Matroid intersection with dynamic rank oracles.

The exchange graph G(S) of a common independent set S has the arcs

    s -> x      x outside S, S + x independent in M1
    x -> t      x outside S, S + x independent in M2
    x -> y      x in S, y outside S, S - x + y independent in M1
    y -> x      x in S, y outside S, S - x + y independent in M2

and shortest s-t paths are augmenting paths. The driver runs
blocking-flow phases (every shortest path of the current length at once)
until the distance passes sqrt(r), then finishes with one shortest path
at a time.
"""

from __future__ import annotations

import math
import sys
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import GroundSetMismatch, NotCommonIndependent
from src.core.exchange_bst import SINK, SOURCE, ExchangeBst, Variant
from src.core.matroids import Matroid
from src.core.oracle import OracleStats, VersionHandle
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class LayeredGraphState:
    """Distance layers of G(S) plus the bookkeeping of one blocking-flow phase."""
    d_t: Optional[int]
    layers: List[List[int]]
    dist: Dict[int, int]
    parent: Dict[int, int]
    last: Optional[int] = None
    alive: List[Set[int]] = field(default_factory=list)
    committed: List[List[int]] = field(default_factory=list)
    trees: List[Optional[ExchangeBst]] = field(default_factory=list)
    path: List[Optional[int]] = field(default_factory=list)

    def shortest_path(self) -> List[int]:
        """Elements of one shortest s-t path, from the first layer to the last."""
        if self.last is None:
            return []
        path = []
        u = self.last
        while u != SOURCE:
            path.append(u)
            u = self.parent[u]
        path.reverse()
        return path


@dataclass
class PhaseRecord:
    d_t: int
    augmentations: int
    dead_ends: List[Tuple[int, int]] = field(default_factory=list)
    rebuilds: int = 0


@dataclass
class IntersectionResult:
    solution: List[int]
    rank_bound: int
    phases: List[PhaseRecord] = field(default_factory=list)
    path_lengths: List[int] = field(default_factory=list)
    stats: OracleStats = field(default_factory=OracleStats)
    stats_m1: OracleStats = field(default_factory=OracleStats)
    stats_m2: OracleStats = field(default_factory=OracleStats)
    approximate: bool = False
    final_distance: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.solution)

    @property
    def augmentations(self) -> int:
        return sum(p.augmentations for p in self.phases) + len(self.path_lengths)


class MatroidIntersection:
    """
    One intersection solve over two matroids on the same ground set.

    Args:
        m1: First matroid
        m2: Second matroid
        initial: Optional common independent set to start from
        epsilon: Stop early once the s-t distance exceeds 1/epsilon
        debug: Cross-check tree answers and independence with direct rank calls
        on_commit: Called as on_commit(S, state) after every committed path
            of a blocking-flow phase
    """

    def __init__(self, m1: Matroid, m2: Matroid, initial: Optional[Iterable[int]] = None,
                 epsilon: Optional[float] = None, debug: bool = False,
                 on_commit: Optional[Callable[[Set[int], LayeredGraphState], None]] = None,
                 pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None):
        if m1.ground_size != m2.ground_size:
            raise GroundSetMismatch(f"ground sets of size {m1.ground_size} and {m2.ground_size}")
        self.m1 = m1
        self.m2 = m2
        self.n = m1.ground_size
        self.epsilon = epsilon
        self.debug = debug
        self.on_commit = on_commit
        self.o1 = m1.oracle(pin_distance, max_auto_pins)
        self.o2 = m2.oracle(pin_distance, max_auto_pins)
        self.q1 = VersionHandle(self.o1)
        self.q2 = VersionHandle(self.o2)
        self.S: Set[int] = set()
        self._rank_bound: Optional[int] = None
        if initial is not None:
            self.reset(initial)

    # ------------------------------------------------------------------

    def reset(self, elements: Iterable[int]) -> None:
        """Start over from a given common independent set."""
        target = set(elements)
        if not (self.m1.is_independent(target) and self.m2.is_independent(target)):
            raise NotCommonIndependent(f"starting set of size {len(target)} is not common independent")
        self._apply(target ^ self.S)

    def _apply(self, delta: Iterable[int]) -> None:
        for x in sorted(delta):
            if x in self.S:
                self.S.discard(x)
                self.q1.delete(x)
                self.q2.delete(x)
            else:
                self.S.add(x)
                self.q1.insert(x)
                self.q2.insert(x)

    def rank_bound(self) -> int:
        """min(rank1(U), rank2(U)) from one oracle pass per matroid."""
        if self._rank_bound is None:
            ranks = []
            for oracle in (self.o1, self.o2):
                handle = VersionHandle.build(oracle, range(self.n), pinned=False)
                ranks.append(handle.rank())
                handle.release()
            self._rank_bound = min(ranks)
        return self._rank_bound

    def stats(self) -> OracleStats:
        return self.o1.stats() + self.o2.stats()

    # ------------------------------------------------------------------
    # BFS

    def build_layers(self) -> LayeredGraphState:
        """
        Distance layers of G(S) by BFS from s.

        Odd layers lie outside S and are reached through a co-circuit tree
        on M1; even layers lie inside S and are reached through a circuit
        tree on M2. Every element is found once, so the whole search costs
        a near-linear number of oracle operations.
        """
        S = self.S
        if self.debug:
            self._check_common_independent()
        outside = [x for x in range(self.n) if x not in S]
        inside = sorted(S)
        t1 = ExchangeBst(self.o1, Variant.COCIRCUIT, S, outside, beta=1, s_handle=self.q1, debug=self.debug)
        t2 = ExchangeBst(self.o2, Variant.CIRCUIT, S, inside, beta=1, s_handle=self.q2, debug=self.debug)
        sink = ExchangeBst(self.o2, Variant.SINK, S, [], beta=1, s_handle=self.q2, debug=self.debug)

        layers: List[List[int]] = [[SOURCE]]
        dist: Dict[int, int] = {}
        parent: Dict[int, int] = {}
        d_t: Optional[int] = None
        last: Optional[int] = None
        frontier = [SOURCE]
        level = 0
        try:
            while frontier:
                level += 1
                tree = t1 if level % 2 == 1 else t2
                found: List[int] = []
                for u in frontier:
                    while True:
                        x = tree.find(u)
                        if x is None:
                            break
                        tree.delete(x)
                        parent[x] = u
                        dist[x] = level
                        found.append(x)
                if not found:
                    break
                layers.append(found)
                if level % 2 == 1:
                    for y in found:
                        if sink.find(y) == SINK:
                            d_t = level + 1
                            last = y
                            break
                    if d_t is not None:
                        layers.append([SINK])
                        break
                frontier = found
        finally:
            t1.close()
            t2.close()
            sink.close()

        logger.debug("BFS from |S|=%d: d_t=%s, layer sizes %s", len(S), d_t, [len(L) for L in layers[1:]])
        return LayeredGraphState(d_t=d_t, layers=layers, dist=dist, parent=parent, last=last)

    # ------------------------------------------------------------------
    # One shortest path

    def augment_one(self) -> Optional[int]:
        """
        Augment S along one shortest s-t path.

        Returns:
            Length of the path used (number of arcs), or None when S is maximum
        """
        state = self.build_layers()
        if state.d_t is None:
            return None
        path = state.shortest_path()
        self._apply(path)
        logger.debug("augmented along a path of length %d, |S|=%d", state.d_t, len(self.S))
        return state.d_t

    # ------------------------------------------------------------------
    # Blocking flow

    def blocking_flow_phase(self, state: Optional[LayeredGraphState] = None) -> PhaseRecord:
        """
        Augment along a maximal family of compatible shortest paths.

        Afterwards the s-t distance in G(S) is strictly larger.
        """
        if state is None:
            state = self.build_layers()
        d = state.d_t
        if d is None:
            return PhaseRecord(d_t=0, augmentations=0)
        S = self.S
        beta = max(1, math.ceil(math.sqrt(max(self.rank_bound(), 1)) / d))
        layers = state.layers

        state.trees = [None] * (d + 1)
        for level in range(1, d):
            if level % 2 == 1:
                state.trees[level] = ExchangeBst(self.o1, Variant.COCIRCUIT, S, layers[level], beta=beta,
                                                 s_handle=self.q1, debug=self.debug)
            else:
                state.trees[level] = ExchangeBst(self.o2, Variant.CIRCUIT, S, layers[level], beta=beta,
                                                 s_handle=self.q2, debug=self.debug)
        state.trees[d] = ExchangeBst(self.o2, Variant.SINK, S, [], beta=beta, s_handle=self.q2, debug=self.debug)
        state.alive = [set(layer) for layer in layers]
        state.committed = [[] for _ in range(d)]
        state.path = [SOURCE] + [None] * d

        record = PhaseRecord(d_t=d, augmentations=0)
        trees = state.trees
        path = state.path
        level = 0
        try:
            while level >= 0:
                if level < d:
                    nxt = trees[level + 1].find(path[level])
                    if nxt is None:
                        if level == 0:
                            break
                        dead = path[level]
                        trees[level].delete(dead)
                        state.alive[level].discard(dead)
                        record.dead_ends.append((level, dead))
                        level -= 1
                    else:
                        level += 1
                        path[level] = nxt
                else:
                    for i in range(1, d):
                        a = path[i]
                        state.committed[i].append(a)
                        state.alive[i].discard(a)
                        trees[i].delete(a)
                        trees[i].update((path[i - 1], a))
                    trees[d].update((path[d - 1],))
                    record.augmentations += 1
                    if self.on_commit is not None:
                        self.on_commit(set(S), state)
                    level = 0
        finally:
            record.rebuilds = sum(t.stats.rebuilds for t in trees[1:] if t is not None)
            for t in trees[1:]:
                if t is not None:
                    t.close()

        changed = [a for layer in state.committed for a in layer]
        self._apply(changed)
        if self.debug:
            self._check_common_independent()
        logger.debug("phase d_t=%d: %d augmentations, %d dead ends, |S|=%d",
                     d, record.augmentations, len(record.dead_ends), len(self.S))
        return record

    # ------------------------------------------------------------------
    # Drivers

    def solve(self) -> IntersectionResult:
        """Blocking-flow phases up to distance sqrt(r), then single augmentations."""
        r = self.rank_bound() if self.n else 0
        result = IntersectionResult(solution=[], rank_bound=r)
        if self.n == 0 or r == 0:
            return self._finish(result)

        cutoff = math.ceil(math.sqrt(r))
        eps_limit = (1.0 / self.epsilon) if self.epsilon else None
        while True:
            state = self.build_layers()
            d = state.d_t
            result.final_distance = d
            if d is None:
                break
            if eps_limit is not None and d > eps_limit:
                result.approximate = True
                logger.info("stopping early at distance %d (epsilon=%s)", d, self.epsilon)
                break
            if d > cutoff:
                path = state.shortest_path()
                self._apply(path)
                result.path_lengths.append(d)
                continue
            result.phases.append(self.blocking_flow_phase(state))
        return self._finish(result)

    def solve_baseline(self) -> IntersectionResult:
        """One shortest augmenting path at a time."""
        result = IntersectionResult(solution=[], rank_bound=0)
        while True:
            length = self.augment_one()
            if length is None:
                break
            result.path_lengths.append(length)
        return self._finish(result)

    def _finish(self, result: IntersectionResult) -> IntersectionResult:
        result.solution = sorted(self.S)
        result.stats_m1 = self.o1.stats()
        result.stats_m2 = self.o2.stats()
        result.stats = result.stats_m1 + result.stats_m2
        logger.info("intersection of size %d after %d phases and %d single paths (%d oracle ops)",
                    len(self.S), len(result.phases), len(result.path_lengths), result.stats.total)
        return result

    def _check_common_independent(self) -> None:
        if self.m1.rank(self.S) != len(self.S) or self.m2.rank(self.S) != len(self.S):
            raise NotCommonIndependent(f"maintained set of size {len(self.S)} is not common independent")


# ----------------------------------------------------------------------
# Function-style entry points


def build_layers(m1: Matroid, m2: Matroid, S: Iterable[int] = ()) -> LayeredGraphState:
    return MatroidIntersection(m1, m2, initial=S).build_layers()


def blocking_flow_phase(m1: Matroid, m2: Matroid, S: Iterable[int] = ()) -> Set[int]:
    solver = MatroidIntersection(m1, m2, initial=S)
    solver.blocking_flow_phase()
    return set(solver.S)


def augment_one(m1: Matroid, m2: Matroid, S: Iterable[int] = ()) -> Optional[Set[int]]:
    solver = MatroidIntersection(m1, m2, initial=S)
    if solver.augment_one() is None:
        return None
    return set(solver.S)


def intersect(m1: Matroid, m2: Matroid, epsilon: Optional[float] = None,
              initial: Optional[Iterable[int]] = None, debug: bool = False) -> IntersectionResult:
    """
    Maximum common independent set of m1 and m2.

    Args:
        m1: First matroid
        m2: Second matroid on the same ground set
        epsilon: Optional approximation parameter; stops once d_t > 1/epsilon
        initial: Optional common independent starting set
        debug: Cross-check internal answers

    Returns:
        IntersectionResult with the solution, phase trace and oracle stats
    """
    return MatroidIntersection(m1, m2, initial=initial, epsilon=epsilon, debug=debug).solve()


def intersect_baseline(m1: Matroid, m2: Matroid, initial: Optional[Iterable[int]] = None) -> IntersectionResult:
    return MatroidIntersection(m1, m2, initial=initial).solve_baseline()
