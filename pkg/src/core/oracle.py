"""Dynamic rank oracle: versioned query-sets built by single-element edits.

Every query-set is a version created from an earlier version by inserting
or deleting one element. Creating a version and asking for its rank are the
counted operations. Internally the oracle keeps a few materialized backend
states (anchors) and one scratch state (the cursor) with an undo trail, so
that editing a version near an anchor costs a handful of backend steps.
"""

from __future__ import annotations

import sys
import os
from abc import ABC, abstractmethod
from array import array
from collections import OrderedDict
from dataclasses import dataclass, fields
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import (
    ElementAbsent,
    ElementAlreadyPresent,
    ElementOutOfGroundSet,
    UnknownVersion,
    VersionReleased,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

ROOT = 0
INSERT = "insert"
DELETE = "delete"

# Replay-length threshold and auto-pin budget used when a caller passes None
TUNING: Dict[str, int] = {"pin_distance": 64, "max_auto_pins": 256}


def configure_tuning(pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None) -> None:
    """Change the process-wide oracle tuning defaults (the config file's ``oracle`` section)."""
    if pin_distance is not None:
        TUNING["pin_distance"] = int(pin_distance)
    if max_auto_pins is not None:
        TUNING["max_auto_pins"] = int(max_auto_pins)


class RankState(ABC):
    """Materialized set plus whatever the backend needs to answer its rank."""

    def __init__(self):
        self.members: Set[int] = set()
        self.rank = 0

    @abstractmethod
    def insert(self, x: int) -> Any:
        """Add x and return an undo token."""

    @abstractmethod
    def delete(self, x: int) -> Any:
        """Remove x and return an undo token."""

    @abstractmethod
    def undo(self, token: Any) -> None:
        """Revert the edit that produced token. Tokens are undone in LIFO order."""

    @abstractmethod
    def copy(self) -> "RankState":
        pass


class RecomputeState(RankState):
    """Fallback state: recomputes the rank from the member set on every edit."""

    def __init__(self, backend: "RankBackend"):
        super().__init__()
        self.backend = backend

    def insert(self, x: int) -> Any:
        token = (INSERT, x, self.rank)
        self.members.add(x)
        self.rank = self.backend.rank(self.members)
        return token

    def delete(self, x: int) -> Any:
        token = (DELETE, x, self.rank)
        self.members.discard(x)
        self.rank = self.backend.rank(self.members)
        return token

    def undo(self, token: Any) -> None:
        kind, x, old_rank = token
        if kind == INSERT:
            self.members.discard(x)
        else:
            self.members.add(x)
        self.rank = old_rank

    def copy(self) -> "RecomputeState":
        clone = RecomputeState(self.backend)
        clone.members = set(self.members)
        clone.rank = self.rank
        return clone


class RankBackend(ABC):
    """Anything with a ground set 0..n-1 and a rank function."""

    @property
    @abstractmethod
    def ground_size(self) -> int:
        pass

    @abstractmethod
    def rank(self, elements: Iterable[int]) -> int:
        """Rank of a set of element ids, without validation."""

    def new_state(self) -> RankState:
        """Empty-set state. Backends with incremental engines override this."""
        return RecomputeState(self)


@dataclass(frozen=True)
class SetVersion:
    """One node of the version forest."""
    id: int
    parent: Optional[int]
    delta: Optional[Tuple[int, str]]
    size: int
    rank: int


@dataclass
class OracleStats:
    inserts: int = 0
    deletes: int = 0
    rank_queries: int = 0
    live_versions: int = 0
    max_set_size: int = 0

    @property
    def total(self) -> int:
        """Counted operations: inserts + deletes + rank queries."""
        return self.inserts + self.deletes + self.rank_queries

    def __add__(self, other: "OracleStats") -> "OracleStats":
        return OracleStats(
            inserts=self.inserts + other.inserts,
            deletes=self.deletes + other.deletes,
            rank_queries=self.rank_queries + other.rank_queries,
            live_versions=self.live_versions + other.live_versions,
            max_set_size=max(self.max_set_size, other.max_set_size),
        )

    def __sub__(self, other: "OracleStats") -> "OracleStats":
        return OracleStats(
            inserts=self.inserts - other.inserts,
            deletes=self.deletes - other.deletes,
            rank_queries=self.rank_queries - other.rank_queries,
            live_versions=self.live_versions - other.live_versions,
            max_set_size=self.max_set_size,
        )

    def to_dict(self) -> Dict[str, int]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["total"] = self.total
        return data


class DynamicRankOracle:
    """
    Versioned rank oracle over one backend.

    Args:
        backend: The matroid answering rank questions
        pin_distance: Replays at least this long auto-pin the target version
        max_auto_pins: Bound on automatically pinned versions (LRU evicted)
    """

    def __init__(self, backend: RankBackend, pin_distance: Optional[int] = None, max_auto_pins: Optional[int] = None):
        self.backend = backend
        self.ground_size = backend.ground_size
        if pin_distance is None:
            pin_distance = TUNING["pin_distance"]
        if max_auto_pins is None:
            max_auto_pins = TUNING["max_auto_pins"]
        self.pin_distance = max(1, pin_distance)
        self.max_auto_pins = max(0, max_auto_pins)

        # Version table. delta is +(x+1) for an insert, -(x+1) for a delete.
        self._parent = array('i', [-1])
        self._delta = array('i', [0])
        self._size = array('i', [0])
        self._rank = array('i', [0])
        self._released = bytearray(1)

        self._anchors: Dict[int, RankState] = {ROOT: backend.new_state()}
        self._pins: Dict[int, int] = {ROOT: 1}
        self._auto_pins: "OrderedDict[int, None]" = OrderedDict()

        self._cursor: Optional[RankState] = None
        self._cursor_base = -1
        self._trail: List[Tuple[int, Any]] = []
        self._trail_pos: Dict[int, int] = {}

        self._stats = OracleStats()

    # ------------------------------------------------------------------
    # Counted operations

    def insert(self, v: int, x: int, release_parent: bool = False) -> int:
        """
        Create materialize(v) + {x}.

        Args:
            v: Parent version
            x: Element id to add
            release_parent: Release v afterwards (lets a pinned v hand its
                state to the new version without copying)

        Returns:
            Id of the new version
        """
        self._check_element(x)
        return self._create(v, x, True, release_parent)

    def delete(self, v: int, x: int, release_parent: bool = False) -> int:
        """Create materialize(v) - {x}. See insert for the arguments."""
        self._check_element(x)
        return self._create(v, x, False, release_parent)

    def query(self, v: int) -> int:
        """Return the cached rank of v."""
        self._check_version(v)
        self._stats.rank_queries += 1
        return self._rank[v]

    # ------------------------------------------------------------------
    # Uncounted plumbing

    def materialize(self, v: int) -> FrozenSet[int]:
        """Return the set of version v by replaying deltas from the nearest anchor."""
        self._check_version(v)
        path = []
        u = v
        while u not in self._anchors:
            path.append(u)
            u = self._parent[u]
        members = set(self._anchors[u].members)
        for w in reversed(path):
            d = self._delta[w]
            if d > 0:
                members.add(d - 1)
            else:
                members.discard(-d - 1)
        return frozenset(members)

    def size(self, v: int) -> int:
        self._check_version(v)
        return self._size[v]

    def version(self, v: int) -> SetVersion:
        self._check_version(v)
        if v == ROOT:
            return SetVersion(ROOT, None, None, 0, 0)
        d = self._delta[v]
        delta = (d - 1, INSERT) if d > 0 else (-d - 1, DELETE)
        return SetVersion(v, self._parent[v], delta, self._size[v], self._rank[v])

    def exists(self, v: int) -> bool:
        return 0 <= v < len(self._parent) and not self._released[v]

    def stats(self) -> OracleStats:
        """Snapshot of the counters."""
        s = self._stats
        return OracleStats(s.inserts, s.deletes, s.rank_queries, s.live_versions, s.max_set_size)

    @property
    def version_count(self) -> int:
        return len(self._parent)

    def pin(self, v: int) -> None:
        """Keep a materialized state for v. Pins are reference counted."""
        self._check_version(v)
        if v not in self._anchors:
            self._anchors[v] = self._take_state(v)
        self._auto_pins.pop(v, None)
        self._pins[v] = self._pins.get(v, 0) + 1

    def unpin(self, v: int) -> None:
        if v == ROOT:
            return
        count = self._pins.get(v)
        if not count:
            return
        if count > 1:
            self._pins[v] = count - 1
        else:
            del self._pins[v]
            self._anchors.pop(v, None)

    def is_pinned(self, v: int) -> bool:
        return v in self._pins

    def release(self, v: int) -> None:
        """Mark v released. The root is never released."""
        if v == ROOT:
            return
        self._check_version(v)
        self._released[v] = 1
        self._stats.live_versions -= 1
        self._pins.pop(v, None)
        self._auto_pins.pop(v, None)
        self._anchors.pop(v, None)

    # ------------------------------------------------------------------
    # Internals

    def _check_version(self, v: int) -> None:
        if not isinstance(v, int) or v < 0 or v >= len(self._parent):
            raise UnknownVersion(v)
        if self._released[v]:
            raise VersionReleased(v)

    def _check_element(self, x: int) -> None:
        if not isinstance(x, int) or x < 0 or x >= self.ground_size:
            raise ElementOutOfGroundSet(x, self.ground_size)

    def _create(self, v: int, x: int, is_insert: bool, release_parent: bool) -> int:
        self._check_version(v)

        transfer = release_parent and v != ROOT and v in self._anchors
        if transfer:
            state = self._anchors[v]
        elif self._cursor is not None and self._current() == v:
            state = self._cursor
        elif v in self._anchors:
            state = self._anchors[v]
        else:
            self._checkout(v)
            state = self._cursor

        if is_insert and x in state.members:
            raise ElementAlreadyPresent(x, f"version {v}")
        if not is_insert and x not in state.members:
            raise ElementAbsent(x, f"version {v}")

        token = state.insert(x) if is_insert else state.delete(x)
        child = self._append(v, x, is_insert, state.rank)

        if transfer:
            del self._anchors[v]
            self._anchors[child] = state
            if v in self._pins:
                self._pins[child] = self._pins.pop(v)
            if v in self._auto_pins:
                del self._auto_pins[v]
                self._auto_pins[child] = None
        elif state is self._cursor:
            self._trail_pos[child] = len(self._trail)
            self._trail.append((child, token))
        else:
            # Anchors stay at their own version: peek the child's rank and undo.
            state.undo(token)

        if release_parent:
            self.release(v)
        return child

    def _append(self, v: int, x: int, is_insert: bool, rank: int) -> int:
        child = len(self._parent)
        self._parent.append(v)
        self._delta.append(x + 1 if is_insert else -(x + 1))
        size = self._size[v] + (1 if is_insert else -1)
        self._size.append(size)
        self._rank.append(rank)
        self._released.append(0)
        if is_insert:
            self._stats.inserts += 1
        else:
            self._stats.deletes += 1
        self._stats.live_versions += 1
        if size > self._stats.max_set_size:
            self._stats.max_set_size = size
        return child

    def _current(self) -> int:
        return self._trail[-1][0] if self._trail else self._cursor_base

    def _rollback_to(self, pos: int) -> None:
        while len(self._trail) - 1 > pos:
            version, token = self._trail.pop()
            del self._trail_pos[version]
            self._cursor.undo(token)

    def _checkout(self, v: int) -> None:
        """Position the cursor state at version v."""
        if self._cursor is not None:
            if v == self._current():
                return
            if v == self._cursor_base:
                self._rollback_to(-1)
                return
            pos = self._trail_pos.get(v)
            if pos is not None:
                self._rollback_to(pos)
                return

        path = []
        u = v
        while True:
            if self._cursor is not None:
                if u == self._cursor_base:
                    self._rollback_to(-1)
                    break
                pos = self._trail_pos.get(u)
                if pos is not None:
                    self._rollback_to(pos)
                    break
            if u in self._anchors:
                self._cursor = self._anchors[u].copy()
                self._cursor_base = u
                self._trail = []
                self._trail_pos = {}
                break
            path.append(u)
            u = self._parent[u]

        for w in reversed(path):
            d = self._delta[w]
            token = self._cursor.insert(d - 1) if d > 0 else self._cursor.delete(-d - 1)
            self._trail_pos[w] = len(self._trail)
            self._trail.append((w, token))

        if len(path) >= self.pin_distance and self.max_auto_pins > 0:
            self._auto_pin(v)

    def _take_state(self, v: int) -> RankState:
        """Return a state for v that the caller may keep, stealing the cursor when possible."""
        if self._cursor is not None and self._current() == v:
            state = self._cursor
            self._cursor = None
            self._cursor_base = -1
            self._trail = []
            self._trail_pos = {}
            return state
        self._checkout(v)
        return self._take_state(v)

    def _auto_pin(self, v: int) -> None:
        if v in self._anchors:
            return
        logger.debug("auto-pinning version %d", v)
        self._anchors[v] = self._cursor.copy()
        self._auto_pins[v] = None
        while len(self._auto_pins) > self.max_auto_pins:
            old, _ = self._auto_pins.popitem(last=False)
            if old not in self._pins:
                self._anchors.pop(old, None)


class VersionHandle:
    """
    A query-set that a data structure keeps editing.

    The handle owns its current version: each edit releases the previous
    version, and a pinned handle keeps its backend state attached so edits
    cost one backend step.
    """

    def __init__(self, oracle: DynamicRankOracle, version: int = ROOT,
                 members: Optional[Iterable[int]] = None, pinned: bool = True,
                 owned: bool = False):
        self.oracle = oracle
        self.version = version
        self.members: Set[int] = set(members) if members is not None else set(oracle.materialize(version))
        self.pinned = pinned
        self.owned = owned and version != ROOT
        if pinned and version != ROOT:
            oracle.pin(version)

    @classmethod
    def build(cls, oracle: DynamicRankOracle, elements: Iterable[int],
              base: Optional["VersionHandle"] = None, pinned: bool = True) -> "VersionHandle":
        """Create a handle for base + elements (or the empty set + elements)."""
        if base is None:
            handle = cls(oracle, ROOT, members=(), pinned=pinned)
        else:
            handle = base.fork(pinned=pinned)
        for x in elements:
            handle.insert(x)
        return handle

    def fork(self, pinned: bool = True) -> "VersionHandle":
        """Second handle on the same set. Neither handle releases the shared version."""
        self.owned = False
        return VersionHandle(self.oracle, self.version, members=self.members,
                             pinned=pinned and self.version != ROOT, owned=False)

    def insert(self, x: int) -> int:
        self._advance(self.oracle.insert(self.version, x, release_parent=self.owned))
        self.members.add(x)
        return self.version

    def delete(self, x: int) -> int:
        self._advance(self.oracle.delete(self.version, x, release_parent=self.owned))
        self.members.discard(x)
        return self.version

    def _advance(self, new_version: int) -> None:
        if self.pinned and not self.oracle.is_pinned(new_version):
            self.oracle.pin(new_version)
        if not self.owned and self.pinned:
            self.oracle.unpin(self.version)
        self.version = new_version
        self.owned = True

    def rank(self) -> int:
        """Counted rank query on the current version."""
        return self.oracle.query(self.version)

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def release(self) -> None:
        if self.owned:
            self.oracle.release(self.version)
        elif self.pinned:
            self.oracle.unpin(self.version)
        self.owned = False
        self.version = ROOT
        self.members = set()
