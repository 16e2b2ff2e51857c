"""Binary search tree over query-sets for exchange and free-element search.

The tree is built over a set X of elements. Every node v caches a
query-set version for S ∪ X_v (co-circuit trees, X outside S) or S - X_v
(circuit trees, X inside S), where S is the maintained set at the last
build and X_v the elements under v. A find descends from the root,
probing the left child each time:

    free element     rank(S + X_v) > |S|
    co-circuit       rank(S - y + X_v) >= |S|
    circuit          rank(S - X_v + y) = |S - X_v + y|

Updates to S are buffered. Probes patch each node's version with the
buffered difference, and the whole tree is rebuilt once the buffer grows
past beta.
"""

from __future__ import annotations

import sys
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import (
    ElementAlreadyInX,
    ElementNotInX,
    GuaranteeViolated,
    ResultingSetDependent,
    VariantSetMismatch,
    WrongSideElement,
)
from src.core.oracle import DynamicRankOracle, VersionHandle
from src.utils.logger import get_logger

logger = get_logger(__name__)

SOURCE = -1
SINK = -2


class Variant(Enum):
    COCIRCUIT = "cocircuit"
    CIRCUIT = "circuit"
    SINK = "sink"


@dataclass
class _Node:
    lo: int
    hi: int
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None
    count: int = 0
    handle: Optional[VersionHandle] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class BstStats:
    finds: int = 0
    empty_finds: int = 0
    rebuilds: int = 0
    probes: int = 0
    descent: List[Tuple[int, int, str]] = field(default_factory=list)


class ExchangeBst:
    """
    Exchange search tree for one matroid.

    Args:
        oracle: Dynamic rank oracle of the matroid
        variant: Which side X lies on, or SINK for the single-element tree
        s_elements: The maintained independent set S
        x_elements: The searchable elements X
        beta: Rebuild threshold for the buffered difference
        s_handle: Optional existing handle for S; it is forked, not edited
        debug: Cross-check every answer with direct rank computations
        spare: Extra empty leaves kept for later add() calls
    """

    def __init__(self, oracle: DynamicRankOracle, variant: Variant, s_elements: Iterable[int],
                 x_elements: Iterable[int], beta: int = 1, s_handle: Optional[VersionHandle] = None,
                 debug: bool = False, spare: int = 0):
        self.oracle = oracle
        self.variant = variant
        self.beta = max(1, int(beta))
        self.debug = debug
        self.stats = BstStats()

        self.s_current: Set[int] = set(s_elements)
        self.s_built: Set[int] = set(self.s_current)
        self.pending: Set[int] = set()

        x_list = list(dict.fromkeys(x_elements))
        self._check_sides(x_list)

        if s_handle is not None:
            if s_handle.members != self.s_current:
                raise VariantSetMismatch("handle does not hold the given set S")
            self.current = s_handle.fork()
        else:
            self.current = VersionHandle.build(oracle, sorted(self.s_current))

        self.slots: List[Optional[int]] = []
        self.pos: Dict[int, int] = {}
        self.free_slots: List[int] = []
        self.root: Optional[_Node] = None
        self.root_handle: Optional[VersionHandle] = None

        if variant == Variant.SINK:
            self.slots = [SINK]
            self.pos = {SINK: 0}
        else:
            self._build(x_list, spare)
            self.root_handle = self._make_root_handle(x_list)

    # ------------------------------------------------------------------
    # Queries

    def __len__(self) -> int:
        return len(self.pos)

    def __contains__(self, x: int) -> bool:
        return x in self.pos

    @property
    def elements(self) -> List[int]:
        return [x for x in self.slots if x is not None]

    def node_count(self) -> int:
        count = 0
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            count += 1
            if not node.is_leaf:
                stack.extend((node.left, node.right))
        return count

    def depth(self) -> int:
        depth = 0
        stack = [(self.root, 0)] if self.root is not None else []
        while stack:
            node, d = stack.pop()
            depth = max(depth, d)
            if not node.is_leaf:
                stack.extend(((node.left, d + 1), (node.right, d + 1)))
        return depth

    def find(self, y: int) -> Optional[int]:
        """
        Find an element of X exchangeable with y.

        Args:
            y: SOURCE or an element of S (co-circuit), an element outside S
                (circuit and sink)

        Returns:
            An element x of X satisfying the exchange predicate, SINK for a
            successful sink test, or None when no such element exists
        """
        self._check_query(y)
        self.stats.finds += 1

        if self.variant == Variant.SINK:
            if SINK not in self.pos:
                self.stats.empty_finds += 1
                return None
            ok = self._probe(self.current.version, [(y, True)]) > len(self.s_current)
            if self.debug:
                self._verify_sink(y, ok)
            if not ok:
                self.stats.empty_finds += 1
                return None
            return SINK

        if self.root is None or self.root.count == 0 or not self._root_test(y):
            self.stats.empty_finds += 1
            if self.debug:
                self._verify_none(y)
            return None

        node = self.root
        self.stats.descent = []
        while not node.is_leaf:
            left, right = node.left, node.right
            if left.count == 0:
                node = right
                branch = "right"
            elif right.count == 0:
                node = left
                branch = "left"
            elif self._test(left, y):
                node = left
                branch = "left"
            else:
                node = right
                branch = "right"
            self.stats.descent.append((node.lo, node.hi, branch))
            if self.debug:
                self._verify_branch(node, y)
        x = self.slots[node.lo]
        if self.debug and not self._predicate(x, y):
            raise GuaranteeViolated(f"find({y}) returned {x}, which is not exchangeable")
        return x

    # ------------------------------------------------------------------
    # Edits of X

    def delete(self, x: int) -> None:
        """Remove x from X, editing the versions on its root-leaf path."""
        if x not in self.pos:
            raise ElementNotInX(x)
        slot = self.pos.pop(x)
        self.slots[slot] = None
        self.free_slots.append(slot)
        if self.variant == Variant.SINK:
            return
        for node in self._path(slot):
            node.count -= 1
            self._node_remove(node, x)
        self._root_remove(x)

    def replace(self, x: int, y: int) -> None:
        """Put y into the leaf of x."""
        if x not in self.pos:
            raise ElementNotInX(x)
        if y in self.pos:
            raise ElementAlreadyInX(y)
        self._check_sides([y])
        slot = self.pos.pop(x)
        self.slots[slot] = y
        self.pos[y] = slot
        for node in self._path(slot):
            self._node_remove(node, x)
            self._node_add(node, y)
        self._root_remove(x)
        self._root_add(y)

    def add(self, y: int) -> None:
        """Insert y into X, using an empty leaf or rebuilding with twice the leaves."""
        if y in self.pos:
            raise ElementAlreadyInX(y)
        self._check_sides([y])
        if self.variant == Variant.SINK:
            raise VariantSetMismatch("the sink tree only holds t")
        if not self.free_slots:
            elements = self.elements + [y]
            logger.debug("growing %s tree to %d leaves", self.variant.value, 2 * len(elements))
            self._release_nodes()
            self.s_built = set(self.s_current)
            self.pending = set()
            self._build(elements, spare=len(elements))
            self.stats.rebuilds += 1
            self._root_add(y)
            return
        slot = self.free_slots.pop()
        self.slots[slot] = y
        self.pos[y] = slot
        for node in self._path(slot):
            node.count += 1
            self._node_add(node, y)
        self._root_add(y)

    # ------------------------------------------------------------------
    # Edits of S

    def update(self, delta: Iterable[int]) -> None:
        """
        Replace S by S xor delta (sentinels ignored).

        Rebuilds the tree when the buffered difference exceeds beta.
        """
        changes = [e for e in dict.fromkeys(delta) if e >= 0]
        if not changes:
            return
        for e in changes:
            if e in self.pos:
                raise VariantSetMismatch(f"element {e} is still in the tree while S changes")
        for e in changes:
            if e in self.s_current:
                self.s_current.discard(e)
                self.current.delete(e)
                if self.root_handle is not None:
                    self.root_handle.delete(e)
            else:
                self.s_current.add(e)
                self.current.insert(e)
                if self.root_handle is not None:
                    self.root_handle.insert(e)
            self.pending ^= {e}
        if self.debug and self.oracle.backend.rank(self.s_current) != len(self.s_current):
            raise ResultingSetDependent(f"update left a dependent set of size {len(self.s_current)}")
        if len(self.pending) > self.beta:
            self.rebuild()

    def rebuild(self) -> None:
        """Rebuild every node version against the current S."""
        self.stats.rebuilds += 1
        logger.debug("rebuilding %s tree over %d elements (buffer %d > beta %d)",
                     self.variant.value, len(self.pos), len(self.pending), self.beta)
        self.s_built = set(self.s_current)
        self.pending = set()
        if self.variant == Variant.SINK:
            return
        elements = self.elements
        spare = len(self.free_slots)
        self._release_nodes()
        self._build(elements, spare)

    def close(self) -> None:
        """Release every version the tree owns."""
        self._release_nodes()
        if self.root_handle is not None:
            self.root_handle.release()
            self.root_handle = None
        self.current.release()

    # ------------------------------------------------------------------
    # Internals

    def _check_sides(self, elements: Iterable[int]) -> None:
        for x in elements:
            if x < 0:
                raise VariantSetMismatch(f"sentinel {x} cannot be placed in a tree")
            inside = x in self.s_current
            if self.variant == Variant.COCIRCUIT and inside:
                raise VariantSetMismatch(f"element {x} of a co-circuit tree lies in S")
            if self.variant == Variant.CIRCUIT and not inside:
                raise VariantSetMismatch(f"element {x} of a circuit tree lies outside S")
            if self.variant == Variant.SINK:
                raise VariantSetMismatch("the sink tree only holds t")

    def _check_query(self, y: int) -> None:
        if self.variant == Variant.COCIRCUIT:
            if y != SOURCE and y not in self.s_current:
                raise WrongSideElement(y, "the source or an element of S")
        elif y < 0 or y in self.s_current:
            raise WrongSideElement(y, "an element outside S")

    def _build(self, elements: List[int], spare: int = 0) -> None:
        self.slots = list(elements) + [None] * spare
        self.pos = {x: i for i, x in enumerate(elements)}
        self.free_slots = list(range(len(self.slots) - 1, len(elements) - 1, -1))
        if not self.slots:
            self.root = None
            return
        self.root = self._build_node(0, len(self.slots), self.current, set(elements))

    def _build_node(self, lo: int, hi: int, parent: VersionHandle, parent_x: Set[int]) -> _Node:
        node = _Node(lo, hi)
        own = [x for x in self.slots[lo:hi] if x is not None]
        node.count = len(own)
        if parent is self.current:
            # root: S ∪ X or S - X
            node.handle = parent.fork()
            for x in own:
                self._node_add(node, x)
        else:
            node.handle = parent.fork()
            for x in parent_x - set(own):
                self._node_remove(node, x)
        if hi - lo > 1:
            mid = (lo + hi) // 2
            own_set = set(own)
            node.left = self._build_node(lo, mid, node.handle, own_set)
            node.right = self._build_node(mid, hi, node.handle, own_set)
        return node

    def _make_root_handle(self, elements: List[int]) -> VersionHandle:
        handle = self.current.fork()
        for x in elements:
            if self.variant == Variant.COCIRCUIT:
                handle.insert(x)
            else:
                handle.delete(x)
        return handle

    def _node_add(self, node: _Node, x: int) -> None:
        """x joins X_v: version S_built ∪ X_v or S_built - X_v."""
        if self.variant == Variant.COCIRCUIT:
            if x not in self.s_built:
                node.handle.insert(x)
        elif x in self.s_built:
            node.handle.delete(x)

    def _node_remove(self, node: _Node, x: int) -> None:
        if self.variant == Variant.COCIRCUIT:
            if x not in self.s_built:
                node.handle.delete(x)
        elif x in self.s_built:
            node.handle.insert(x)

    def _root_add(self, x: int) -> None:
        if self.variant == Variant.COCIRCUIT:
            self.root_handle.insert(x)
        else:
            self.root_handle.delete(x)

    def _root_remove(self, x: int) -> None:
        if self.variant == Variant.COCIRCUIT:
            self.root_handle.delete(x)
        else:
            self.root_handle.insert(x)

    def _path(self, slot: int) -> List[_Node]:
        path = []
        node = self.root
        while node is not None:
            path.append(node)
            if node.is_leaf:
                break
            node = node.left if slot < node.left.hi else node.right
        return path

    def _release_nodes(self) -> None:
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            if node.handle is not None:
                node.handle.release()
                node.handle = None
            if node.left is not None:
                stack.append(node.left)
                stack.append(node.right)
        self.root = None

    def _probe(self, base: int, edits: List[Tuple[int, bool]]) -> int:
        """Rank of base patched by edits; intermediate versions are released."""
        self.stats.probes += 1
        v = base
        for x, is_insert in edits:
            if is_insert:
                v = self.oracle.insert(v, x, release_parent=v != base)
            else:
                v = self.oracle.delete(v, x, release_parent=v != base)
        rank = self.oracle.query(v)
        if v != base:
            self.oracle.release(v)
        return rank

    def _y_edit(self, y: int) -> List[Tuple[int, bool]]:
        if y == SOURCE:
            return []
        return [(y, self.variant != Variant.COCIRCUIT)]

    def _passes(self, rank: int, size_x: int, y: int) -> bool:
        s = len(self.s_current)
        if self.variant == Variant.COCIRCUIT:
            return rank > s if y == SOURCE else rank >= s
        return rank == s - size_x + 1

    def _root_test(self, y: int) -> bool:
        rank = self._probe(self.root_handle.version, self._y_edit(y))
        return self._passes(rank, len(self.pos), y)

    def _test(self, node: _Node, y: int) -> bool:
        edits = []
        for e in self.pending:
            p = self.pos.get(e)
            if p is not None and node.lo <= p < node.hi:
                continue
            edits.append((e, e in self.s_current))
        edits.extend(self._y_edit(y))
        rank = self._probe(node.handle.version, edits)
        return self._passes(rank, node.count, y)

    # ------------------------------------------------------------------
    # Debug cross-checks (uncounted)

    def _predicate(self, x: int, y: int) -> bool:
        backend = self.oracle.backend
        s = self.s_current
        if self.variant == Variant.COCIRCUIT:
            candidate = (s | {x}) if y == SOURCE else ((s - {y}) | {x})
        else:
            candidate = (s - {x}) | {y}
        return backend.rank(candidate) == len(candidate)

    def _verify_none(self, y: int) -> None:
        for x in self.elements:
            if self._predicate(x, y):
                raise GuaranteeViolated(f"find({y}) returned nothing but {x} is exchangeable")

    def _verify_sink(self, y: int, ok: bool) -> None:
        s = self.s_current | {y}
        if (self.oracle.backend.rank(s) == len(s)) != ok:
            raise GuaranteeViolated(f"sink test for {y} disagrees with a direct rank computation")

    def _verify_branch(self, node: _Node, y: int) -> None:
        own = [x for x in self.slots[node.lo:node.hi] if x is not None]
        if not any(self._predicate(x, y) for x in own):
            raise GuaranteeViolated(f"descent for {y} entered [{node.lo}, {node.hi}) without an exchange")


# ----------------------------------------------------------------------
# Function-style entry points


def bst_initialize(oracle: DynamicRankOracle, s_elements: Iterable[int], x_elements: Iterable[int],
                   beta: int = 1, variant: Variant = Variant.COCIRCUIT,
                   s_handle: Optional[VersionHandle] = None) -> ExchangeBst:
    return ExchangeBst(oracle, variant, s_elements, x_elements, beta=beta, s_handle=s_handle)


def bst_find(tree: ExchangeBst, y: int) -> Optional[int]:
    return tree.find(y)


def bst_delete(tree: ExchangeBst, x: int) -> None:
    tree.delete(x)


def bst_replace(tree: ExchangeBst, x: int, y: int) -> None:
    tree.replace(x, y)


def bst_update(tree: ExchangeBst, delta: Iterable[int]) -> None:
    """Tell the tree that S changed by the symmetric difference delta."""
    tree.update(delta)
