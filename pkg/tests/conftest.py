"""Shared fixtures for the matroidkit tests."""

import sys
import os

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.matroids import Graphic, Partition, Uniform
from src.core.testkit import InstanceGenerator
from src.utils.helpers import get_instances_dir

INSTANCES = get_instances_dir()


def complete_graph_edges(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


@pytest.fixture
def instances_dir():
    return INSTANCES


@pytest.fixture
def gen():
    return InstanceGenerator(1234)


@pytest.fixture
def k4():
    return Graphic(4, complete_graph_edges(4))


@pytest.fixture
def k5():
    return Graphic(5, complete_graph_edges(5))


@pytest.fixture
def c4():
    return Graphic(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def small_pair():
    """A partition matroid and a uniform matroid on six elements."""
    return Partition(["a", "a", "b", "b", "c", "c"]), Uniform(6, 2)
