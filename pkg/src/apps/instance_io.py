"""Reading instance files: graphs, job lists, matrices and matroid JSON."""

import json
import sys
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Hashable, List, Optional, Tuple, Union

import networkx as nx

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from src.core.errors import InstanceFormatError, MalformedInstance
from src.core.matroids import (
    MERSENNE_31,
    Bicircular,
    ConvexTransversal,
    Graphic,
    Linear,
    Matroid,
    Partition,
    matroid_from_dict,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

EDGE_KEYS = ("c", "w", "rel", "dl", "id")


@dataclass
class GraphInstance:
    """
    A multigraph read from a graph file.

    Vertices are renumbered 0..V-1 in order of first appearance; the names
    used in the file are kept in ``vertex_labels``.
    """

    num_vertices: int
    edges: List[Tuple[int, int]]
    vertex_labels: List[str] = field(default_factory=list)
    edge_labels: List[str] = field(default_factory=list)
    colors: List[Optional[str]] = field(default_factory=list)
    weights: List[Optional[float]] = field(default_factory=list)
    release: List[int] = field(default_factory=list)
    deadline: List[Optional[int]] = field(default_factory=list)
    path: Optional[str] = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def _extras(self) -> Dict[str, Any]:
        extra: Dict[str, Any] = {"labels": self.edge_labels}
        if self.weights and all(w is not None for w in self.weights):
            extra["weights"] = list(self.weights)
        return extra

    def graphic(self) -> Graphic:
        return Graphic(self.num_vertices, self.edges, **self._extras())

    def bicircular(self) -> Bicircular:
        return Bicircular(self.num_vertices, self.edges, **self._extras())

    def is_connected(self) -> bool:
        if self.num_vertices <= 1:
            return True
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(self.edges)
        return nx.is_connected(g)

    def summary(self) -> Dict[str, Any]:
        return {"vertices": self.num_vertices, "edges": self.num_edges}


@dataclass
class Job:
    name: str
    first: Tuple[int, int]
    second: Optional[Tuple[int, int]] = None


def _open_lines(path: PathLike) -> List[Tuple[int, List[str]]]:
    """Non-empty, non-comment lines split on whitespace, with 1-based line numbers."""
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                rows.append((number, text.split()))
    return rows


def _int(token: str, path: PathLike, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(f"{what} must be an integer, got {token!r}", str(path), line) from None


def read_graph(path: PathLike) -> GraphInstance:
    """
    Parse a graph file.

    Format::

        n <vertices> m <edges>
        u v [c=<color>] [w=<weight>] [rel=<day>] [dl=<day>] [id=<name>]
        ...

    Args:
        path: File to read

    Returns:
        The parsed GraphInstance
    """
    rows = _open_lines(path)
    if not rows:
        raise InstanceFormatError("empty graph file", str(path))
    line, header = rows[0]
    if len(header) != 4 or header[0] != "n" or header[2] != "m":
        raise InstanceFormatError("header must read 'n <vertices> m <edges>'", str(path), line)
    num_vertices = _int(header[1], path, line, "vertex count")
    num_edges = _int(header[3], path, line, "edge count")
    if num_vertices < 0 or num_edges < 0:
        raise InstanceFormatError("counts must be non-negative", str(path), line)

    graph = GraphInstance(num_vertices=num_vertices, edges=[], path=str(path))
    index: Dict[str, int] = {}

    def vertex(name: str, line: int) -> int:
        if name not in index:
            if len(index) == num_vertices:
                raise InstanceFormatError(f"more than {num_vertices} distinct vertices", str(path), line)
            index[name] = len(index)
            graph.vertex_labels.append(name)
        return index[name]

    for line, tokens in rows[1:]:
        if len(tokens) < 2:
            raise InstanceFormatError("edge line needs two endpoints", str(path), line)
        u, v = vertex(tokens[0], line), vertex(tokens[1], line)
        attrs: Dict[str, str] = {}
        for token in tokens[2:]:
            key, sep, value = token.partition("=")
            if not sep or key not in EDGE_KEYS:
                raise InstanceFormatError(f"unknown edge attribute {token!r}", str(path), line)
            attrs[key] = value
        graph.edges.append((u, v))
        graph.edge_labels.append(attrs.get("id", f"e{len(graph.edges)}"))
        graph.colors.append(attrs.get("c"))
        if "w" in attrs:
            try:
                graph.weights.append(float(attrs["w"]))
            except ValueError:
                raise InstanceFormatError(f"weight must be a number, got {attrs['w']!r}", str(path), line) from None
        else:
            graph.weights.append(None)
        graph.release.append(_int(attrs["rel"], path, line, "release day") if "rel" in attrs else 1)
        graph.deadline.append(_int(attrs["dl"], path, line, "deadline") if "dl" in attrs else None)
        if graph.deadline[-1] is not None and graph.deadline[-1] < graph.release[-1]:
            raise InstanceFormatError("deadline before release day", str(path), line)
        if graph.release[-1] < 1:
            raise InstanceFormatError("release day must be at least 1", str(path), line)

    if len(graph.edges) != num_edges:
        raise InstanceFormatError(f"header announces {num_edges} edges, found {len(graph.edges)}", str(path))
    while len(graph.vertex_labels) < num_vertices:
        graph.vertex_labels.append(f"v{len(graph.vertex_labels)}")
    logger.debug("read graph %s: %d vertices, %d edges", path, num_vertices, num_edges)
    return graph


def read_jobs(path: PathLike) -> List[Job]:
    """
    Parse a job file: one job per line, ``id s1 t1 [s2 t2]``.

    The first interval constrains the job on the first resource, the
    optional second one on the second resource.
    """
    jobs = []
    for line, tokens in _open_lines(path):
        if len(tokens) not in (3, 5):
            raise InstanceFormatError("job line must read 'id s1 t1 [s2 t2]'", str(path), line)
        nums = [_int(t, path, line, "slot") for t in tokens[1:]]
        intervals = [(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]
        for s, t in intervals:
            if s < 1 or s > t:
                raise InstanceFormatError(f"bad interval [{s}, {t}]", str(path), line)
        jobs.append(Job(tokens[0], intervals[0], intervals[1] if len(intervals) > 1 else None))
    names = [j.name for j in jobs]
    if len(set(names)) != len(names):
        raise InstanceFormatError("job ids must be unique", str(path))
    return jobs


def jobs_to_matroids(jobs: List[Job]) -> Tuple[ConvexTransversal, ConvexTransversal]:
    """
    Two convex transversal matroids over the jobs.

    A job without a second interval may take any slot of the second
    resource.
    """
    labels = [j.name for j in jobs]
    horizon = max([j.first[1] for j in jobs] + [j.second[1] for j in jobs if j.second], default=0)
    first = ConvexTransversal([j.first for j in jobs], labels=labels)
    second = ConvexTransversal([j.second or (1, max(horizon, 1)) for j in jobs],
                               slots=max(horizon, 1) if jobs else 0, labels=labels)
    return first, second


def read_linear(path: PathLike) -> Linear:
    """
    Parse a matrix file: a ``field <p>`` header, then one row per element.

    ``field Q`` (or ``field rational``) computes ranks over the rationals.
    """
    rows = _open_lines(path)
    if not rows:
        raise InstanceFormatError("empty matrix file", str(path))
    line, header = rows[0]
    if len(header) != 2 or header[0] != "field":
        raise InstanceFormatError("header must read 'field <p>'", str(path), line)
    exact = header[1] in ("Q", "rational")
    field_size = None if exact else _int(header[1], path, line, "field size")
    matrix: List[List[int]] = []
    for line, tokens in rows[1:]:
        if matrix and len(tokens) != len(matrix[0]):
            raise InstanceFormatError(f"row has {len(tokens)} entries, expected {len(matrix[0])}", str(path), line)
        matrix.append([_int(t, path, line, "matrix entry") for t in tokens])
    try:
        return Linear(matrix, field=field_size if field_size is not None else MERSENNE_31, exact=exact)
    except MalformedInstance as e:
        raise InstanceFormatError(str(e), str(path)) from e


def read_matroid_json(path: PathLike) -> Matroid:
    """Load one matroid from a ``{"kind": ..., ...}`` JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"invalid JSON: {e.msg}", str(path), e.lineno) from e
    try:
        return matroid_from_dict(data)
    except MalformedInstance as e:
        raise InstanceFormatError(str(e), str(path)) from e


def color_partition(graph: GraphInstance) -> Partition:
    """Partition matroid allowing one edge per color; uncolored edges get their own color."""
    colors: List[Hashable] = [c if c is not None else f"__edge{i}" for i, c in enumerate(graph.colors)]
    return Partition(colors, labels=graph.edge_labels)


def bipartite_sides(graph: GraphInstance) -> Tuple[Partition, Partition]:
    """
    Endpoint partition matroids of a bipartite graph.

    The first matroid allows one edge per left vertex, the second one per
    right vertex.
    """
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_vertices))
    g.add_edges_from(graph.edges)
    if any(u == v for u, v in graph.edges) or not nx.is_bipartite(g):
        raise MalformedInstance(f"graph {graph.path or '<memory>'} is not bipartite")
    side = nx.bipartite.color(g)
    left, right = [], []
    for u, v in graph.edges:
        if side[u] == 1:
            u, v = v, u
        left.append(u)
        right.append(v)
    return (Partition(left, labels=graph.edge_labels),
            Partition(right, labels=graph.edge_labels))


def align_edges(g1: GraphInstance, g2: GraphInstance) -> List[int]:
    """
    Bijection from the edges of g1 to those of g2.

    Edges are matched by ``id=`` when every edge of both graphs carries a
    distinct one, otherwise by line order.

    Returns:
        order such that edge i of g1 corresponds to edge order[i] of g2
    """
    if g1.num_edges != g2.num_edges:
        raise MalformedInstance(f"edge counts differ: {g1.num_edges} and {g2.num_edges}")
    auto = [f"e{i + 1}" for i in range(g1.num_edges)]
    if g1.edge_labels != auto and g2.edge_labels != auto:
        position = {label: i for i, label in enumerate(g2.edge_labels)}
        if len(position) == g2.num_edges and set(position) == set(g1.edge_labels):
            return [position[label] for label in g1.edge_labels]
        raise MalformedInstance("edge ids of the two graphs do not match one to one")
    return list(range(g1.num_edges))
