"""Tests for the exchange search trees."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import (
    ElementAlreadyInX,
    ElementNotInX,
    ResultingSetDependent,
    VariantSetMismatch,
    WrongSideElement,
)
from src.core.exchange_bst import (
    SINK,
    SOURCE,
    ExchangeBst,
    Variant,
    bst_delete,
    bst_find,
    bst_initialize,
    bst_replace,
    bst_update,
)
from src.core.matroids import Graphic
from src.core.testkit import InstanceGenerator, greedy_basis

# path 0-1-2-3 (edges 0, 1, 2) plus chords
GRAPH = Graphic(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 1)])
LOOP = 5


def independent(m, elements):
    return m.rank(elements) == len(set(elements))


def test_free_element_search():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0}, [2, 3, 4, LOOP], debug=True)
    x = tree.find(SOURCE)
    assert x in (2, 3, 4)
    assert independent(GRAPH, {0, x})


def test_free_element_search_on_a_basis_finds_nothing():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0, 1, 2}, [3, 4, LOOP], debug=True)
    assert tree.find(SOURCE) is None
    assert tree.stats.empty_finds == 1


def test_cocircuit_exchange():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0, 1, 2}, [4, LOOP], debug=True)
    # removing edge 1-2 separates {0, 1} from {2, 3}; chord 0-2 reconnects
    assert tree.find(1) == 4
    # removing edge 2-3 isolates vertex 3; no candidate touches it
    assert tree.find(2) is None


def test_circuit_exchange():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.CIRCUIT, {0, 1, 2}, [0, 2], debug=True)
    # chord 0-2 closes the cycle 0-1-2; only edge 0 of X lies on it
    assert tree.find(4) == 0
    # 3-0 closes the whole path
    assert tree.find(3) in (0, 2)
    # a loop never fits
    assert tree.find(LOOP) is None


def test_sink_tree():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.SINK, {0}, [], debug=True)
    assert tree.find(1) == SINK
    assert tree.find(LOOP) is None
    tree.delete(SINK)
    assert tree.find(1) is None


def test_wrong_side_queries_and_elements():
    o = GRAPH.oracle()
    cocircuit = ExchangeBst(o, Variant.COCIRCUIT, {0, 1}, [2, 3])
    with pytest.raises(WrongSideElement):
        cocircuit.find(3)
    circuit = ExchangeBst(o, Variant.CIRCUIT, {0, 1}, [0])
    with pytest.raises(WrongSideElement):
        circuit.find(0)
    with pytest.raises(WrongSideElement):
        circuit.find(SOURCE)
    with pytest.raises(VariantSetMismatch):
        ExchangeBst(o, Variant.COCIRCUIT, {0, 1}, [1, 2])
    with pytest.raises(VariantSetMismatch):
        ExchangeBst(o, Variant.CIRCUIT, {0, 1}, [2])


def test_delete_replace_add():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0}, [2, 3, LOOP], debug=True)
    tree.delete(2)
    tree.delete(3)
    assert 2 not in tree
    assert tree.find(SOURCE) is None
    tree.replace(LOOP, 4)
    assert tree.find(SOURCE) == 4
    tree.add(1)
    assert len(tree) == 2
    assert tree.find(SOURCE) in (1, 4)
    with pytest.raises(ElementNotInX):
        tree.delete(2)
    with pytest.raises(ElementAlreadyInX):
        tree.add(4)


def test_add_grows_a_full_tree():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, set(), [LOOP], debug=True)
    assert tree.find(SOURCE) is None
    tree.add(0)
    tree.add(1)
    assert tree.stats.rebuilds >= 1
    assert set(tree.elements) == {LOOP, 0, 1}
    assert tree.find(SOURCE) in (0, 1)


def test_update_follows_the_set():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0}, [2, 3, 4], beta=5, debug=True)
    tree.update([1])
    assert tree.s_current == {0, 1}
    assert tree.pending == {1}
    # S = path 0-1-2 now; 0-2 closes a cycle, the others are free
    for _ in range(2):
        x = tree.find(SOURCE)
        assert x in (2, 3)
        tree.delete(x)
    assert tree.find(SOURCE) is None


def test_update_rebuilds_past_beta():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, set(), [2, 3], beta=1)
    tree.update([0])
    assert tree.stats.rebuilds == 0
    tree.update([1])
    assert tree.stats.rebuilds == 1
    assert tree.pending == set()
    assert tree.s_built == {0, 1}


def test_update_rejects_elements_still_in_the_tree():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, set(), [2, 3])
    with pytest.raises(VariantSetMismatch):
        tree.update([2])


def test_update_detects_dependent_sets_in_debug_mode():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0, 1}, [2], debug=True)
    with pytest.raises(ResultingSetDependent):
        tree.update([4])


def test_close_releases_versions():
    o = GRAPH.oracle()
    tree = ExchangeBst(o, Variant.COCIRCUIT, {0}, [2, 3, 4])
    live = o.stats().live_versions
    tree.close()
    assert o.stats().live_versions < live


def _random_independent(gen, m):
    n = m.ground_size
    pool = [x for x in range(n) if gen.rng.random() < 0.6]
    return greedy_basis(m, pool, weights=[gen.rng.random() for _ in range(n)])


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6), st.integers(2, 12), st.sampled_from(("graphic", "partition", "transversal")),
       st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_cocircuit_find_matches_brute_force(seed, n, kind, beta):
    gen = InstanceGenerator(seed)
    m = gen.matroid(kind, n)
    S = _random_independent(gen, m)
    X = [x for x in range(n) if x not in S]
    tree = ExchangeBst(m.oracle(), Variant.COCIRCUIT, S, X, beta=beta)
    for y in [SOURCE] + sorted(S):
        x = tree.find(y)
        base = set(S) if y == SOURCE else set(S) - {y}
        fits = [c for c in tree.elements if independent(m, base | {c})]
        if x is None:
            assert fits == []
        else:
            assert x in fits
            tree.delete(x)


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6), st.integers(2, 12), st.sampled_from(("graphic", "partition", "scheduling")))
@settings(max_examples=60, deadline=None)
def test_circuit_find_matches_brute_force(seed, n, kind):
    gen = InstanceGenerator(seed)
    m = gen.matroid(kind, n)
    S = _random_independent(gen, m)
    tree = ExchangeBst(m.oracle(), Variant.CIRCUIT, S, sorted(S))
    for y in [x for x in range(n) if x not in S]:
        x = tree.find(y)
        fits = [c for c in tree.elements if independent(m, (set(S) - {c}) | {y})]
        if x is None:
            assert fits == []
        else:
            assert x in fits


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6), st.integers(3, 10))
@settings(max_examples=40, deadline=None)
def test_finds_stay_correct_across_buffered_updates(seed, n):
    """Co-circuit answers after S grows by free elements taken out of X."""
    gen = InstanceGenerator(seed)
    m = gen.matroid("graphic", n)
    S = set()
    tree = ExchangeBst(m.oracle(), Variant.COCIRCUIT, S, range(n), beta=3, debug=True)
    while True:
        x = tree.find(SOURCE)
        if x is None:
            break
        tree.delete(x)
        tree.update([x])
        S.add(x)
        assert independent(m, S)
    assert len(S) == m.full_rank()


def test_function_style_entry_points():
    o = GRAPH.oracle()
    tree = bst_initialize(o, {0}, [2, 3, LOOP], beta=2)
    assert tree.variant == Variant.COCIRCUIT
    bst_delete(tree, 2)
    bst_replace(tree, 3, 4)
    assert bst_find(tree, SOURCE) == 4
    bst_update(tree, [1])
    # S = {0, 1} is the path 0-1-2 and chord 0-2 closes a cycle with it
    assert bst_find(tree, SOURCE) is None


def test_find_descends_one_root_to_leaf_path():
    m = Graphic(6, [(i, j) for i in range(6) for j in range(i + 1, 6)])
    o = m.oracle()
    s = {0, 5, 9}
    rest = [x for x in range(m.ground_size) if x not in s]
    tree = ExchangeBst(o, Variant.COCIRCUIT, s, rest)
    before = tree.stats.probes
    x = tree.find(SOURCE)
    assert x is not None
    assert independent(m, s | {x})
    # one test at the root, then at most one per level
    assert tree.stats.probes - before <= tree.depth() + 1
    assert 1 <= len(tree.stats.descent) <= tree.depth()
    lo, hi, _ = tree.stats.descent[-1]
    assert hi == lo + 1
    assert tree.slots[lo] == x
    spans = [hi - lo for lo, hi, _ in tree.stats.descent]
    assert spans == sorted(spans, reverse=True)
