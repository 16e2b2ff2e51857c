"""Matroid union, k-fold union, packing and covering.

The union exchange graph H(S) of a partition S = S_1 + ... + S_k has

    s -> u      u outside S
    u -> v      v in S_i, u not in S_i, S_i - v + u independent in M_i
    u -> t      S_i + u independent in M_i for some i with u not in S_i

Augmenting along a shortest path s, a_1, ..., a_{d-1}, t moves every a_j
into the class a_{j+1} used to be in, and a_{d-1} into the class that
accepted it, so S grows by a_1. The first layer is only ever read from
dynamic min-weight bases of U - S, which keeps every phase at O(r) elements
instead of O(n).
"""

from __future__ import annotations

import math
import sys
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.dynamic_basis import DynamicBasis
from src.core.errors import (
    GroundSetMismatch,
    GuaranteeViolated,
    InvalidArgument,
    LoopElement,
    NotCommonIndependent,
    ZeroRankMatroid,
)
from src.core.exchange_bst import SINK, SOURCE, ExchangeBst, Variant
from src.core.intersection import LayeredGraphState, PhaseRecord
from src.core.matroids import Matroid
from src.core.oracle import DynamicRankOracle, OracleStats, VersionHandle
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class UnionLayers(LayeredGraphState):
    sink_class: Optional[int] = None


@dataclass
class UnionResult:
    classes: List[List[int]]
    rank_bound: int
    phases: List[PhaseRecord] = field(default_factory=list)
    path_lengths: List[int] = field(default_factory=list)
    stats: OracleStats = field(default_factory=OracleStats)

    @property
    def solution(self) -> List[int]:
        return sorted(x for cls in self.classes for x in cls)

    @property
    def size(self) -> int:
        return sum(len(cls) for cls in self.classes)

    @property
    def augmentations(self) -> int:
        return sum(p.augmentations for p in self.phases) + len(self.path_lengths)


@dataclass
class PackingResult:
    k: int
    bases: List[List[int]]
    rank: int
    stats: OracleStats = field(default_factory=OracleStats)
    probes: List[Tuple[int, bool]] = field(default_factory=list)


@dataclass
class CoveringResult:
    alpha: int
    partition: List[List[int]]
    stats: OracleStats = field(default_factory=OracleStats)
    probes: List[Tuple[int, bool]] = field(default_factory=list)


class MatroidUnion:
    """
    Union of k matroids on the same ground set.

    Args:
        matroids: M_1..M_k
        initial: Optional starting partition, one list per matroid
        debug: Check every class for independence after each phase
    """

    def __init__(self, matroids: Sequence[Matroid], initial: Optional[Sequence[Iterable[int]]] = None,
                 debug: bool = False, pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None):
        if not matroids:
            raise InvalidArgument("matroid union needs at least one matroid")
        sizes = {m.ground_size for m in matroids}
        if len(sizes) != 1:
            raise GroundSetMismatch(f"ground sets of sizes {sorted(sizes)}")
        self.matroids = list(matroids)
        self.k = len(self.matroids)
        self.n = self.matroids[0].ground_size
        self.debug = debug

        self.oracles = self._make_oracles(pin_distance, max_auto_pins)
        self.classes: List[Set[int]] = [set() for _ in range(self.k)]
        self.owner: Dict[int, int] = {}
        self.handles = [VersionHandle(o) for o in self.oracles]

        if initial is not None:
            self._load(initial)
        outside = [x for x in range(self.n) if x not in self.owner]
        self.bases = self._make_bases(outside)
        self._rank_bound = self._compute_rank_bound()

    # ------------------------------------------------------------------
    # Hooks the k-fold variant overrides

    def _make_oracles(self, pin_distance: int, max_auto_pins: int) -> List[DynamicRankOracle]:
        return [m.oracle(pin_distance, max_auto_pins) for m in self.matroids]

    def _make_bases(self, outside: List[int]) -> List[DynamicBasis]:
        return [DynamicBasis(o, outside, weight=m.weight) for o, m in zip(self.oracles, self.matroids)]

    def _compute_rank_bound(self) -> int:
        return min(self.n, len(self.owner) + sum(len(b.basis) for b in self.bases))

    def _explores(self, u: int, ctx: "_BfsContext") -> bool:
        return True

    def _phase_setup(self, layers: List[List[int]]) -> None:
        pass

    def _spanned(self, level: int, a: int) -> bool:
        return False

    def _dead_end(self, level: int, a: int) -> None:
        pass

    def _phase_teardown(self) -> None:
        pass

    # ------------------------------------------------------------------

    def _load(self, initial: Sequence[Iterable[int]]) -> None:
        if len(initial) != self.k:
            raise InvalidArgument(f"{len(initial)} initial classes for {self.k} matroids")
        for i, cls in enumerate(initial):
            for x in cls:
                if x in self.owner:
                    raise NotCommonIndependent(f"element {x} appears in two classes")
                self.owner[x] = i
                self.classes[i].add(x)
        for i, m in enumerate(self.matroids):
            if not m.is_independent(self.classes[i]):
                raise NotCommonIndependent(f"class {i} is dependent")
        self._sync_handles()

    @property
    def rank_bound(self) -> int:
        return self._rank_bound

    @property
    def S(self) -> Set[int]:
        return set(self.owner)

    def first_layer(self) -> List[int]:
        """B_1 + ... + B_k: the bases of U - S the structures maintain."""
        layer: Set[int] = set()
        for b in self.bases:
            layer |= b.basis
        return sorted(layer)

    def stats(self) -> OracleStats:
        total = OracleStats()
        for o in dict.fromkeys(self.oracles):
            total = total + o.stats()
        return total

    def _sync_handles(self) -> None:
        for handle, cls in zip(self.handles, self.classes):
            for x in sorted(handle.members - cls):
                handle.delete(x)
            for x in sorted(cls - handle.members):
                handle.insert(x)

    def _targets(self, u: int) -> List[int]:
        own = self.owner.get(u)
        return [i for i in range(self.k) if i != own]

    # ------------------------------------------------------------------
    # BFS

    def build_layers(self) -> UnionLayers:
        """
        Distance layers of H(S), searched from the first layer B_1 + ... + B_k.
        """
        first = self.first_layer()
        trees = [ExchangeBst(o, Variant.CIRCUIT, cls, sorted(cls), beta=1, s_handle=h)
                 for o, cls, h in zip(self.oracles, self.classes, self.handles)]
        sinks = [ExchangeBst(o, Variant.SINK, cls, [], beta=1, s_handle=h)
                 for o, cls, h in zip(self.oracles, self.classes, self.handles)]
        ctx = _BfsContext(self)

        layers: List[List[int]] = [[SOURCE], first]
        dist = {u: 1 for u in first}
        parent = {u: SOURCE for u in first}
        d_t: Optional[int] = None
        last: Optional[int] = None
        sink_class: Optional[int] = None
        frontier = first
        level = 1
        try:
            while frontier:
                found: List[int] = []
                for u in frontier:
                    if d_t is not None:
                        break
                    if not self._explores(u, ctx):
                        continue
                    for i in self._targets(u):
                        if sinks[i].find(u) == SINK:
                            d_t, last, sink_class = level + 1, u, i
                            break
                        while True:
                            v = trees[i].find(u)
                            if v is None:
                                break
                            trees[i].delete(v)
                            dist[v] = level + 1
                            parent[v] = u
                            found.append(v)
                if d_t is not None or not found:
                    break
                layers.append(found)
                frontier = found
                level += 1
        finally:
            ctx.close()
            for t in trees + sinks:
                t.close()

        if d_t is not None:
            layers = layers[:d_t] + [[SINK]]
        logger.debug("union BFS from |S|=%d, |B|=%d: d_t=%s, layer sizes %s",
                     len(self.owner), len(first), d_t, [len(L) for L in layers[1:]])
        return UnionLayers(d_t=d_t, layers=layers, dist=dist, parent=parent, last=last, sink_class=sink_class)

    # ------------------------------------------------------------------
    # Augmentation

    def _move_along(self, path: List[int], sink_class: int) -> List[int]:
        """Reassign classes along a shortest path; returns replacements that joined the bases."""
        old = [self.owner.get(a) for a in path]
        new = old[1:] + [sink_class]
        for a, c in zip(path, old):
            if c is not None:
                self.classes[c].discard(a)
        for a, c in zip(path, new):
            self.classes[c].add(a)
            self.owner[a] = c
        replacements = []
        for b in self.bases:
            if path[0] in b:
                rep = b.delete(path[0])
                if rep is not None:
                    replacements.append(rep)
        return replacements

    def augment_one(self) -> Optional[int]:
        """Augment along one shortest path. Returns its length, or None when S is maximum."""
        state = self.build_layers()
        if state.d_t is None:
            return None
        self._move_along(state.shortest_path(), state.sink_class)
        self._sync_handles()
        if self.debug:
            self._check_partition()
        return state.d_t

    def blocking_flow_phase(self, state: Optional[UnionLayers] = None) -> PhaseRecord:
        """
        Augment along a maximal family of compatible shortest paths of H(S).

        Afterwards the s-t distance is strictly larger and every basis
        structure holds a basis of the new U - S.
        """
        if state is None:
            state = self.build_layers()
        d = state.d_t
        if d is None:
            return PhaseRecord(d_t=0, augmentations=0)
        beta = max(1, math.ceil(math.sqrt(max(self._rank_bound, 1)) / d))
        layers = state.layers
        self._phase_setup(layers)

        trees: List[List[Optional[ExchangeBst]]] = [[None] * self.k for _ in range(d + 1)]
        for level in range(2, d):
            for i, (o, cls, h) in enumerate(zip(self.oracles, self.classes, self.handles)):
                own = [x for x in layers[level] if x in cls]
                if own:
                    trees[level][i] = ExchangeBst(o, Variant.CIRCUIT, cls, own, beta=beta, s_handle=h)
        for i, (o, cls, h) in enumerate(zip(self.oracles, self.classes, self.handles)):
            trees[d][i] = ExchangeBst(o, Variant.SINK, cls, [], beta=beta, s_handle=h)

        first: Dict[int, None] = dict.fromkeys(layers[1])
        alive = [set(layer) for layer in layers]
        path: List[Optional[int]] = [SOURCE] + [None] * d
        accepted: Optional[int] = None
        record = PhaseRecord(d_t=d, augmentations=0)
        level = 0
        try:
            while level >= 0:
                if level < d:
                    if level == 0:
                        if not first:
                            break
                        level = 1
                        path[1] = next(iter(first))
                        continue
                    a = path[level]
                    if level >= 2 and self._spanned(level, a):
                        trees[level][self.owner[a]].delete(a)
                        alive[level].discard(a)
                        record.dead_ends.append((level, a))
                        level -= 1
                        continue
                    nxt = None
                    for i in self._targets(a):
                        tree = trees[level + 1][i]
                        if tree is None:
                            continue
                        found = tree.find(a)
                        if found is not None:
                            nxt, accepted = found, i
                            break
                    if nxt is None:
                        if level >= 2:
                            self._dead_end(level, a)
                            trees[level][self.owner[a]].delete(a)
                            alive[level].discard(a)
                        else:
                            first.pop(a, None)
                        record.dead_ends.append((level, a))
                        level -= 1
                    else:
                        level += 1
                        path[level] = nxt
                else:
                    walk = path[1:d]
                    first.pop(walk[0], None)
                    for lvl in range(2, d):
                        a = walk[lvl - 1]
                        tree = trees[lvl][self.owner[a]]
                        alive[lvl].discard(a)
                        tree.delete(a)
                        tree.update((walk[lvl - 2], a))
                    trees[d][accepted].update((walk[-1],))
                    for rep in self._move_along(walk, accepted):
                        first[rep] = None
                    record.augmentations += 1
                    level = 0
        finally:
            record.rebuilds = sum(t.stats.rebuilds for row in trees for t in row if t is not None)
            for row in trees:
                for t in row:
                    if t is not None:
                        t.close()
            self._phase_teardown()

        self._sync_handles()
        if self.debug:
            self._check_partition()
        logger.debug("union phase d_t=%d: %d augmentations, %d dead ends, |S|=%d",
                     d, record.augmentations, len(record.dead_ends), len(self.owner))
        return record

    # ------------------------------------------------------------------
    # Driver

    def cutoff(self) -> int:
        return math.ceil(math.sqrt(max(self._rank_bound, 1)))

    def solve(self) -> UnionResult:
        """Blocking-flow phases while d_t <= sqrt(r), then one path at a time."""
        result = UnionResult(classes=[], rank_bound=self._rank_bound)
        cutoff = self.cutoff()
        while True:
            state = self.build_layers()
            d = state.d_t
            if d is None:
                break
            if d > cutoff:
                self._move_along(state.shortest_path(), state.sink_class)
                self._sync_handles()
                result.path_lengths.append(d)
                continue
            result.phases.append(self.blocking_flow_phase(state))
        result.classes = [sorted(cls) for cls in self.classes]
        result.stats = self.stats()
        if self.debug:
            self._check_partition()
        logger.info("union of %d matroids: size %d after %d phases and %d single paths (%d oracle ops)",
                    self.k, result.size, len(result.phases), len(result.path_lengths), result.stats.total)
        return result

    def _check_partition(self) -> None:
        seen: Set[int] = set()
        for i, (m, cls) in enumerate(zip(self.matroids, self.classes)):
            if m.rank(cls) != len(cls):
                raise GuaranteeViolated(f"class {i} of size {len(cls)} is dependent")
            if seen & cls:
                raise GuaranteeViolated(f"class {i} overlaps an earlier class")
            seen |= cls
        for b in self.bases:
            outside = [x for x in range(self.n) if x not in self.owner]
            if b.oracle.backend.rank(b.basis) != len(b.basis) or \
                    b.oracle.backend.rank(b.basis) != b.oracle.backend.rank(outside):
                raise GuaranteeViolated("basis structure is out of sync with U - S")


class _BfsContext:
    """Per-BFS scratch: the independent prefix R of the k-fold skip rule."""

    def __init__(self, solver: MatroidUnion):
        self.R: Optional[VersionHandle] = None
        self.rank = 0
        if isinstance(solver, KFoldUnion):
            self.R = VersionHandle(solver.oracle)

    def grows(self, u: int) -> bool:
        """R + u independent? Keeps u in R when it is."""
        oracle = self.R.oracle
        v = oracle.insert(self.R.version, u)
        rank = oracle.query(v)
        oracle.release(v)
        if rank > self.rank:
            self.R.insert(u)
            self.rank = rank
            return True
        return False

    def close(self) -> None:
        if self.R is not None:
            self.R.release()


class KFoldUnion(MatroidUnion):
    """
    k-fold union of one matroid.

    One oracle and one basis structure serve every class. The BFS only
    explores out of elements that grow an independent prefix R, and the
    blocking flow drops path elements spanned by the earlier layers plus
    that layer's dead ends.
    """

    def __init__(self, matroid: Matroid, k: int, initial: Optional[Sequence[Iterable[int]]] = None,
                 debug: bool = False, pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None):
        if k < 1:
            raise InvalidArgument(f"k must be at least 1, got {k}")
        self.matroid = matroid
        self.oracle = matroid.oracle(pin_distance, max_auto_pins)
        self._prefix: List[Optional[VersionHandle]] = []
        self._prefix_rank: List[int] = []
        super().__init__([matroid] * k, initial=initial, debug=debug)

    def _make_oracles(self, pin_distance: int, max_auto_pins: int) -> List[DynamicRankOracle]:
        return [self.oracle] * self.k

    def _make_bases(self, outside: List[int]) -> List[DynamicBasis]:
        return [DynamicBasis(self.oracle, outside, weight=self.matroid.weight)]

    def _compute_rank_bound(self) -> int:
        r = len(self.bases[0].basis) if not self.owner else self.matroid.rank(range(self.n))
        self.matroid_rank = r
        return min(self.n, self.k * r)

    def _explores(self, u: int, ctx: _BfsContext) -> bool:
        return ctx.grows(u)

    def _phase_setup(self, layers: List[List[int]]) -> None:
        # prefix[l] holds L_1 + ... + L_{l-1} + R_l
        d = len(layers) - 1
        self._prefix = [None] * d
        self._prefix_rank = [0] * d
        chain = VersionHandle(self.oracle)
        for level in range(1, d - 1):
            for x in layers[level]:
                chain.insert(x)
            self._prefix[level + 1] = chain.fork()
            self._prefix_rank[level + 1] = chain.rank()
        chain.release()

    def _spanned(self, level: int, a: int) -> bool:
        handle = self._prefix[level]
        v = self.oracle.insert(handle.version, a)
        rank = self.oracle.query(v)
        self.oracle.release(v)
        return rank == self._prefix_rank[level]

    def _dead_end(self, level: int, a: int) -> None:
        # passed the span test, so R_l + a raises the rank by one
        self._prefix[level].insert(a)
        self._prefix_rank[level] += 1

    def _phase_teardown(self) -> None:
        for handle in self._prefix:
            if handle is not None:
                handle.release()
        self._prefix = []
        self._prefix_rank = []


# ----------------------------------------------------------------------
# Function-style entry points


def union_bfs(matroids: Sequence[Matroid], classes: Optional[Sequence[Iterable[int]]] = None) -> UnionLayers:
    return MatroidUnion(matroids, initial=classes).build_layers()


def union_blocking_flow(matroids: Sequence[Matroid],
                        classes: Optional[Sequence[Iterable[int]]] = None) -> List[List[int]]:
    solver = MatroidUnion(matroids, initial=classes)
    solver.blocking_flow_phase()
    return [sorted(cls) for cls in solver.classes]


def kfold_bfs(matroid: Matroid, k: int, classes: Optional[Sequence[Iterable[int]]] = None) -> UnionLayers:
    return KFoldUnion(matroid, k, initial=classes).build_layers()


def kfold_blocking_flow(matroid: Matroid, k: int,
                        classes: Optional[Sequence[Iterable[int]]] = None) -> List[List[int]]:
    solver = KFoldUnion(matroid, k, initial=classes)
    solver.blocking_flow_phase()
    return [sorted(cls) for cls in solver.classes]


def matroid_union(matroids: Sequence[Matroid], debug: bool = False) -> UnionResult:
    """
    Largest S partitionable into S_1..S_k with S_i independent in M_i.

    Args:
        matroids: M_1..M_k on a common ground set
        debug: Re-check the partition after every phase

    Returns:
        UnionResult with one sorted class per matroid
    """
    return MatroidUnion(matroids, debug=debug).solve()


def kfold_union(matroid: Matroid, k: int, debug: bool = False) -> UnionResult:
    """Largest S partitionable into k independent sets of one matroid."""
    return KFoldUnion(matroid, k, debug=debug).solve()


def packing(matroid: Matroid) -> PackingResult:
    """
    Largest number of pairwise disjoint bases.

    Binary search over k in [0, n // r]; k bases fit iff the k-fold union
    has size k * r.
    """
    n = matroid.ground_size
    r = matroid.rank(range(n))
    if r == 0:
        raise ZeroRankMatroid("every matroid of rank 0 packs infinitely many empty bases")
    out = PackingResult(k=0, bases=[], rank=r)
    lo, hi = 0, n // r
    while lo < hi:
        mid = (lo + hi + 1) // 2
        result = kfold_union(matroid, mid)
        out.stats = out.stats + result.stats
        fits = result.size == mid * r
        out.probes.append((mid, fits))
        if fits:
            lo, out.bases = mid, result.classes
        else:
            hi = mid - 1
    out.k = lo
    if not lo:
        out.bases = []
    logger.info("packing: %d disjoint bases of rank %d", lo, r)
    return out


def covering(matroid: Matroid, upper_bound: Optional[int] = None) -> CoveringResult:
    """
    Fewest independent sets covering the ground set.

    Doubles alpha until the k-fold union covers everything, then binary
    searches the last doubling step. A known upper bound skips the doubling.
    """
    n = matroid.ground_size
    for x in range(n):
        if matroid.rank([x]) == 0:
            raise LoopElement(x)
    out = CoveringResult(alpha=0, partition=[])
    if n == 0:
        return out

    def covers(alpha: int) -> Optional[List[List[int]]]:
        result = kfold_union(matroid, alpha)
        out.stats = out.stats + result.stats
        out.probes.append((alpha, result.size == n))
        return result.classes if result.size == n else None

    hi, best, lo = None, None, 0
    if upper_bound is not None and upper_bound >= 1:
        hi = min(upper_bound, n)
        best = covers(hi)
        if best is None:
            lo, hi = hi, None
    if hi is None:
        alpha = max(1, lo * 2)
        while True:
            alpha = min(alpha, n)
            best = covers(alpha)
            if best is not None:
                hi = alpha
                break
            lo = alpha
            alpha *= 2
    # lo fails (or is 0), hi covers
    while hi - lo > 1:
        mid = (lo + hi) // 2
        classes = covers(mid)
        if classes is not None:
            hi, best = mid, classes
        else:
            lo = mid
    out.alpha = hi
    out.partition = [cls for cls in best if cls]
    logger.info("covering: %d independent sets cover %d elements", hi, n)
    return out
