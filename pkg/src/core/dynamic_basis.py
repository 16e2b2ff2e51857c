"""Decremental min-weight basis.

BlockStructure keeps X sorted by weight and cut into blocks of about
sqrt(k) elements, with one prefix query-set X_1 + ... + X_j per block. An
element belongs to the greedy basis iff it raises the rank of the prefix
ending at it, so a deletion only has to find the first prefix whose rank
did not drop and rescan that one block.

DynamicBasis stacks BlockStructures in a balanced tree split by weight.
Leaves hold at most 2r raw elements, and every inner node runs a
BlockStructure over the bases of its two children, so each node works on
O(r) elements and a deletion walks one leaf-root path.
"""

from __future__ import annotations

import math
import sys
import os
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Set, Tuple, Union

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import DuplicateWeights, ElementAbsent, ElementPresent, GuaranteeViolated
from src.core.oracle import ROOT, DynamicRankOracle, RankBackend, VersionHandle
from src.utils.logger import get_logger

logger = get_logger(__name__)

WeightKey = Callable[[int], Hashable]


def greedy_basis(backend: RankBackend, elements: Iterable[int],
                 weight: Optional[WeightKey] = None) -> Set[int]:
    """
    Min-weight basis by the greedy rule, straight on the backend (uncounted).

    Args:
        backend: Matroid or any rank backend
        elements: The set X
        weight: Sort key; defaults to backend.weight, else the element id

    Returns:
        The elements x of X with rank(X_<=x) > rank(X_<x)
    """
    key = weight or getattr(backend, "weight", None) or (lambda x: x)
    state = backend.new_state()
    basis = set()
    for x in sorted(set(elements), key=key):
        before = state.rank
        token = state.insert(x)
        if state.rank > before:
            basis.add(x)
        else:
            state.undo(token)
    return basis


def _default_weight(oracle: DynamicRankOracle) -> WeightKey:
    return getattr(oracle.backend, "weight", None) or (lambda x: x)


def _check_unique(keys: List[Hashable]) -> None:
    if len(set(keys)) != len(keys):
        raise DuplicateWeights("element weights must be pairwise distinct")


@dataclass
class _Block:
    elements: List[int]
    keys: List[Hashable]
    prefix: VersionHandle
    rank: int


@dataclass
class BlockStats:
    deletes: int = 0
    inserts: int = 0
    replacements: int = 0
    rescans: int = 0
    splits: int = 0
    merges: int = 0


class BlockStructure:
    """
    Square-root block decomposition of a weighted set X.

    Args:
        oracle: Dynamic rank oracle of the matroid
        elements: Initial X
        weight: Sort key; defaults to the matroid's weights
        k: Size parameter fixing the block length ceil(sqrt(k)); defaults to |X|
        debug: Recompute the greedy basis after every edit and compare
    """

    def __init__(self, oracle: DynamicRankOracle, elements: Iterable[int],
                 weight: Optional[WeightKey] = None, k: Optional[int] = None, debug: bool = False):
        self.oracle = oracle
        self.weight = weight or _default_weight(oracle)
        self.debug = debug
        self.stats = BlockStats()

        ordered = sorted(dict.fromkeys(elements), key=self.weight)
        keys = [self.weight(x) for x in ordered]
        _check_unique(keys)

        self.k = max(1, k if k is not None else len(ordered))
        self.block_size = math.ceil(math.sqrt(self.k))
        self.blocks: List[_Block] = []
        self.block_of: Dict[int, _Block] = {}
        self.basis: Set[int] = set()

        chain = VersionHandle(oracle)
        prev_rank = 0
        for start in range(0, len(ordered), self.block_size):
            chunk = ordered[start:start + self.block_size]
            for x in chunk:
                chain.insert(x)
                rank = chain.rank()
                if rank > prev_rank:
                    self.basis.add(x)
                prev_rank = rank
            blk = _Block(chunk, keys[start:start + self.block_size], chain.fork(), prev_rank)
            self.blocks.append(blk)
            for x in chunk:
                self.block_of[x] = blk
        chain.release()

        if self.debug:
            self._verify()

    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.block_of)

    def __contains__(self, x: int) -> bool:
        return x in self.block_of

    @property
    def elements(self) -> List[int]:
        return [x for blk in self.blocks for x in blk.elements]

    @property
    def rank(self) -> int:
        return self.blocks[-1].rank if self.blocks else 0

    def block_sizes(self) -> List[int]:
        return [len(blk.elements) for blk in self.blocks]

    # ------------------------------------------------------------------

    def delete(self, x: int) -> Optional[int]:
        """
        Remove x from X.

        Returns:
            The element that joins the basis in place of x, or None
        """
        blk = self.block_of.pop(x, None)
        if blk is None:
            raise ElementAbsent(x, "basis structure")
        self.stats.deletes += 1
        i = self.blocks.index(blk)
        for b in self.blocks[i:]:
            b.prefix.delete(x)
        at = blk.elements.index(x)
        del blk.elements[at]
        del blk.keys[at]

        replacement = None
        if x in self.basis:
            self.basis.discard(x)
            recovered = None
            for j in range(i, len(self.blocks)):
                b = self.blocks[j]
                rank = b.prefix.rank()
                if rank == b.rank:
                    recovered = j
                    break
                b.rank = rank
            if recovered is not None:
                replacement = self._rescan(recovered)
                if replacement is not None:
                    self.stats.replacements += 1

        self._rebalance(blk)
        if self.debug:
            self._verify()
        return replacement

    def insert(self, x: int) -> None:
        """
        Add x to X. The caller guarantees that x is not in the new basis,
        so no prefix rank changes.
        """
        if x in self.block_of:
            raise ElementPresent(x, "basis structure")
        if self.debug and x in greedy_basis(self.oracle.backend, self.elements + [x], self.weight):
            raise GuaranteeViolated(f"inserted element {x} would join the basis")
        self.stats.inserts += 1
        key = self.weight(x)

        if not self.blocks:
            blk = _Block([x], [key], self._extend(None, [x]), 0)
            self.blocks.append(blk)
            self.block_of[x] = blk
            return

        i = len(self.blocks) - 1
        for j, b in enumerate(self.blocks):
            if b.keys[-1] > key:
                i = j
                break
        blk = self.blocks[i]
        at = bisect_left(blk.keys, key)
        if at < len(blk.keys) and blk.keys[at] == key:
            raise DuplicateWeights(f"element {x} repeats an existing weight")
        blk.elements.insert(at, x)
        blk.keys.insert(at, key)
        self.block_of[x] = blk
        for b in self.blocks[i:]:
            b.prefix.insert(x)

        if len(blk.elements) > 2 * self.block_size:
            self._split(i)
        if self.debug:
            self._verify()

    def close(self) -> None:
        for blk in self.blocks:
            blk.prefix.release()
        self.blocks = []
        self.block_of = {}

    # ------------------------------------------------------------------

    def _extend(self, base: Optional[VersionHandle], elements: List[int]) -> VersionHandle:
        """Owned, pinned handle for base + elements, built with raw oracle edits."""
        start = base.version if base is not None else ROOT
        v = start
        for x in elements:
            v = self.oracle.insert(v, x, release_parent=v != start)
        members = set(base.members) if base is not None else set()
        members.update(elements)
        return VersionHandle(self.oracle, v, members=members, pinned=True, owned=v != start)

    def _rescan(self, j: int) -> Optional[int]:
        """Rerun the greedy rule inside block j; returns the element that joined the basis."""
        self.stats.rescans += 1
        blk = self.blocks[j]
        start = self.blocks[j - 1].prefix.version if j > 0 else ROOT
        prev = self.blocks[j - 1].rank if j > 0 else 0
        v = start
        joined = None
        for x in blk.elements:
            v = self.oracle.insert(v, x, release_parent=v != start)
            rank = self.oracle.query(v)
            if rank > prev and x not in self.basis:
                self.basis.add(x)
                joined = x
            elif rank == prev and x in self.basis:
                raise GuaranteeViolated(f"basis element {x} became dependent after a deletion")
            prev = rank
        if v != start:
            self.oracle.release(v)
        return joined

    def _split(self, i: int) -> None:
        blk = self.blocks[i]
        half = len(blk.elements) // 2
        base = self.blocks[i - 1].prefix if i > 0 else None
        first = blk.elements[:half]
        prefix = self._extend(base, first)
        new = _Block(first, blk.keys[:half], prefix, prefix.rank())
        blk.elements = blk.elements[half:]
        blk.keys = blk.keys[half:]
        self.blocks.insert(i, new)
        for x in first:
            self.block_of[x] = new
        self.stats.splits += 1
        logger.debug("split block %d into %d + %d", i, len(first), len(blk.elements))

    def _rebalance(self, blk: _Block) -> None:
        if len(blk.elements) * 2 >= self.block_size:
            return
        i = self.blocks.index(blk)
        if len(self.blocks) == 1:
            if not blk.elements:
                blk.prefix.release()
                self.blocks = []
            return
        self.stats.merges += 1
        if i + 1 < len(self.blocks):
            # X_i joins X_{i+1}; Q_i is no longer needed
            nxt = self.blocks[i + 1]
            nxt.elements = blk.elements + nxt.elements
            nxt.keys = blk.keys + nxt.keys
            target, at = nxt, i
        else:
            # last block joins its predecessor, which takes over the larger prefix
            prv = self.blocks[i - 1]
            prv.elements = prv.elements + blk.elements
            prv.keys = prv.keys + blk.keys
            prv.prefix, blk.prefix = blk.prefix, prv.prefix
            prv.rank = blk.rank
            target, at = prv, i - 1
        blk.prefix.release()
        self.blocks.remove(blk)
        for x in target.elements:
            self.block_of[x] = target
        if len(target.elements) > 2 * self.block_size:
            self._split(at)

    def _verify(self) -> None:
        expected = greedy_basis(self.oracle.backend, self.elements, self.weight)
        if expected != self.basis:
            raise GuaranteeViolated(
                f"maintained basis {sorted(self.basis)} differs from greedy {sorted(expected)}")


@dataclass
class _SparsifierNode:
    structure: BlockStructure
    parent: Optional["_SparsifierNode"] = None
    children: List["_SparsifierNode"] = field(default_factory=list)


class DynamicBasis:
    """
    Min-weight basis of X under deletions.

    Args:
        oracle: Dynamic rank oracle of the matroid
        elements: Initial X
        weight: Sort key; defaults to the matroid's weights
        leaf_size: Largest raw leaf; defaults to max(2, 2 * rank(X))
        debug: Cross-check every node against a greedy recompute
    """

    def __init__(self, oracle: DynamicRankOracle, elements: Iterable[int],
                 weight: Optional[WeightKey] = None, leaf_size: Optional[int] = None,
                 debug: bool = False):
        self.oracle = oracle
        self.weight = weight or _default_weight(oracle)
        self.debug = debug
        self.last_touched = 0

        ordered = sorted(dict.fromkeys(elements), key=self.weight)
        _check_unique([self.weight(x) for x in ordered])
        self.members: Set[int] = set(ordered)

        if leaf_size is None:
            leaf_size = max(2, 2 * self._rank_of(ordered))
        self.leaf_size = max(1, leaf_size)

        self.leaf_of: Dict[int, _SparsifierNode] = {}
        self.root = self._build(ordered, None) if ordered else None
        logger.debug("sparsifier over %d elements: leaf size %d, height %d",
                     len(ordered), self.leaf_size, self.height())

    def _rank_of(self, elements: List[int]) -> int:
        v = ROOT
        for x in elements:
            v = self.oracle.insert(v, x, release_parent=v != ROOT)
        rank = self.oracle.query(v)
        if v != ROOT:
            self.oracle.release(v)
        return rank

    def _build(self, ordered: List[int], parent: Optional[_SparsifierNode]) -> _SparsifierNode:
        if len(ordered) <= self.leaf_size:
            node = _SparsifierNode(BlockStructure(self.oracle, ordered, self.weight, debug=self.debug), parent)
            for x in ordered:
                self.leaf_of[x] = node
            return node
        mid = len(ordered) // 2
        node = _SparsifierNode(None, parent)
        node.children = [self._build(ordered[:mid], node), self._build(ordered[mid:], node)]
        merged = node.children[0].structure.basis | node.children[1].structure.basis
        node.structure = BlockStructure(self.oracle, merged, self.weight,
                                        k=max(len(merged), self.leaf_size), debug=self.debug)
        return node

    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.members

    @property
    def basis(self) -> Set[int]:
        return set(self.root.structure.basis) if self.root is not None else set()

    def height(self) -> int:
        depth = 0
        stack = [(self.root, 1)] if self.root is not None else []
        while stack:
            node, d = stack.pop()
            depth = max(depth, d)
            stack.extend((child, d + 1) for child in node.children)
        return depth

    def node_count(self) -> int:
        count = 0
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children)
        return count

    def delete(self, x: int) -> Optional[int]:
        """
        Remove x from X.

        Returns:
            The element that replaces x in the maintained basis, or None
        """
        node = self.leaf_of.pop(x, None)
        if node is None:
            raise ElementAbsent(x, "dynamic basis")
        self.members.discard(x)

        touched = 1
        was_basis = x in node.structure.basis
        replacement = node.structure.delete(x)
        while node.parent is not None and was_basis:
            parent = node.parent
            if replacement is not None:
                parent.structure.insert(replacement)
            was_basis = x in parent.structure.basis
            replacement = parent.structure.delete(x)
            node = parent
            touched += 1
        self.last_touched = touched

        if self.debug:
            expected = greedy_basis(self.oracle.backend, self.members, self.weight)
            if expected != self.basis:
                raise GuaranteeViolated(f"basis after deleting {x} differs from greedy recompute")
        return replacement

    def close(self) -> None:
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            node.structure.close()
            stack.extend(node.children)
        self.root = None


# ----------------------------------------------------------------------
# Function-style entry points


def basis_init(matroid: Union[RankBackend, DynamicRankOracle], elements: Optional[Iterable[int]] = None,
               weight: Optional[WeightKey] = None, debug: bool = False) -> Tuple[DynamicBasis, Set[int]]:
    """
    Build the decremental basis structure.

    Args:
        matroid: A matroid (a fresh oracle is made) or an existing oracle
        elements: The set X; defaults to the whole ground set
        weight: Sort key; defaults to the matroid's weights
        debug: Cross-check against greedy recomputes

    Returns:
        (structure, min-weight basis of X)
    """
    if isinstance(matroid, DynamicRankOracle):
        oracle = matroid
    else:
        if hasattr(matroid, "check_weights"):
            matroid.check_weights()
        oracle = matroid.oracle() if hasattr(matroid, "oracle") else DynamicRankOracle(matroid)
    if elements is None:
        elements = range(oracle.ground_size)
    structure = DynamicBasis(oracle, elements, weight=weight, debug=debug)
    return structure, structure.basis


def basis_delete(structure: DynamicBasis, x: int) -> Optional[int]:
    return structure.delete(x)


def baseline_insert(structure: BlockStructure, x: int) -> None:
    structure.insert(x)
