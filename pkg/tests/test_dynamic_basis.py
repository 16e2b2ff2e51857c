"""Tests for the decremental min-weight basis structures."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete_graph_edges
from src.core.dynamic_basis import (
    BlockStructure,
    DynamicBasis,
    baseline_insert,
    basis_delete,
    basis_init,
    greedy_basis,
)
from src.core.errors import DuplicateWeights, ElementAbsent, ElementPresent, GuaranteeViolated
from src.core.matroids import Graphic, Uniform
from src.core.testkit import InstanceGenerator


def test_greedy_basis_respects_weights(c4):
    assert greedy_basis(c4, range(4)) == {0, 1, 2}
    heavy_first = [4.0, 3.0, 2.0, 1.0]
    assert greedy_basis(c4, range(4), weight=lambda x: heavy_first[x]) == {1, 2, 3}


def test_cycle_deletion_reports_the_replacement(c4):
    structure, basis = basis_init(c4)
    assert basis == {0, 1, 2}
    assert basis_delete(structure, 1) == 3
    assert structure.basis == {0, 2, 3}
    # a non-basis element leaves without a replacement
    structure2, _ = basis_init(c4)
    assert structure2.delete(3) is None
    assert structure2.basis == {0, 1, 2}


def test_delete_absent_element_raises(c4):
    structure, _ = basis_init(c4)
    structure.delete(0)
    with pytest.raises(ElementAbsent):
        structure.delete(0)


def test_duplicate_weights_rejected():
    m = Uniform(3, 2, weights=[1.0, 1.0, 2.0])
    with pytest.raises(DuplicateWeights):
        basis_init(m)


def test_weights_choose_the_basis():
    m = Graphic(3, [(0, 1), (1, 2), (2, 0)], weights=[3.0, 1.0, 2.0])
    structure, basis = basis_init(m)
    assert basis == {1, 2}
    assert structure.delete(2) == 0
    assert structure.basis == {0, 1}


def test_basis_init_on_subset_and_existing_oracle(k4):
    o = k4.oracle()
    structure, basis = basis_init(o, [0, 1, 3, 5])
    assert basis == greedy_basis(k4, [0, 1, 3, 5])
    assert len(structure) == 4
    assert 5 in structure


def test_sparsifier_tree_with_small_leaves():
    m = Graphic(6, complete_graph_edges(6))
    structure = DynamicBasis(m.oracle(), range(m.ground_size), leaf_size=3, debug=True)
    assert structure.height() > 2
    assert structure.node_count() > 3
    remaining = set(range(m.ground_size))
    for x in [0, 5, 9, 1, 2, 3, 4]:
        replacement = structure.delete(x)
        remaining.discard(x)
        assert structure.basis == greedy_basis(m, remaining)
        if replacement is not None:
            assert replacement in structure.basis
    assert structure.last_touched >= 1


def test_empty_structure():
    m = Uniform(0, 0)
    structure, basis = basis_init(m)
    assert basis == set()
    assert len(structure) == 0
    assert structure.height() == 0


class TestBlockStructure:
    def test_blocks_have_square_root_size(self):
        m = Uniform(16, 5)
        blocks = BlockStructure(m.oracle(), range(16))
        assert blocks.block_size == 4
        assert blocks.block_sizes() == [4, 4, 4, 4]
        assert blocks.basis == {0, 1, 2, 3, 4}
        assert blocks.rank == 5

    def test_delete_then_rescan(self):
        m = Uniform(10, 3)
        blocks = BlockStructure(m.oracle(), range(10), debug=True)
        assert blocks.delete(1) == 3
        assert blocks.delete(0) == 4
        assert blocks.delete(8) is None
        assert blocks.basis == {2, 3, 4}
        assert blocks.stats.replacements == 2

    def test_blocks_merge_when_they_shrink(self):
        m = Uniform(9, 9)
        blocks = BlockStructure(m.oracle(), range(9), debug=True)
        for x in (0, 1, 2, 3):
            blocks.delete(x)
        assert blocks.stats.merges >= 1
        assert sorted(blocks.elements) == [4, 5, 6, 7, 8]
        assert blocks.basis == {4, 5, 6, 7, 8}

    def test_insert_non_basis_element(self, c4):
        blocks = BlockStructure(c4.oracle(), [0, 1, 2], debug=True)
        baseline_insert(blocks, 3)
        assert 3 in blocks
        assert blocks.basis == {0, 1, 2}
        with pytest.raises(ElementPresent):
            blocks.insert(3)

    def test_insert_that_would_join_the_basis_is_caught(self, c4):
        blocks = BlockStructure(c4.oracle(), [0, 1], debug=True)
        with pytest.raises(GuaranteeViolated):
            blocks.insert(2)

    def test_inserts_split_large_blocks(self):
        m = Uniform(12, 1)
        blocks = BlockStructure(m.oracle(), [0, 1], k=4)
        for x in range(2, 12):
            blocks.insert(x)
        assert blocks.stats.splits >= 1
        assert max(blocks.block_sizes()) <= 2 * blocks.block_size
        assert blocks.basis == {0}


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6), st.integers(1, 14),
       st.sampled_from(("graphic", "partition", "bicircular", "transversal", "linear")),
       st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_deletions_track_the_greedy_basis(seed, n, kind, leaf_size):
    gen = InstanceGenerator(seed)
    m = gen.matroid(kind, n)
    order = list(range(n))
    gen.rng.shuffle(order)
    structure = DynamicBasis(m.oracle(), range(n), leaf_size=leaf_size)
    remaining = set(range(n))
    for x in order:
        before = structure.basis
        replacement = structure.delete(x)
        remaining.discard(x)
        after = greedy_basis(m, remaining)
        assert structure.basis == after
        if x in before and replacement is not None:
            assert after == (before - {x}) | {replacement}
        else:
            assert after == before - {x}


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6), st.integers(2, 64),
       st.sampled_from(("graphic", "partition", "linear")), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_each_delete_stays_on_one_leaf_root_path(seed, n, kind, leaf_size):
    gen = InstanceGenerator(seed)
    m = gen.matroid(kind, n)
    o = m.oracle()
    structure = DynamicBasis(o, range(n), leaf_size=leaf_size)
    height = structure.height()
    per_node = 50 * math.sqrt(2 * max(m.full_rank(), 1)) * max(math.log2(n), 1) + 10
    order = list(range(n))
    gen.rng.shuffle(order)
    for x in order:
        before = o.stats().total
        structure.delete(x)
        assert 1 <= structure.last_touched <= 2 * height
        assert o.stats().total - before <= structure.last_touched * per_node
