import numpy as np
import pytest
from hypothesis import given

from labelforest.graph import RootedTree, enumerate_parent_arrays
from labelforest.hld import bfs_renumber, decompose, parents_first_order
from labelforest.invariants import (
    census_bound,
    check_census,
    check_decomposition,
    check_heavy_choice,
    check_rld_rules,
)

from .oracles import naive_decomposition
from .strategies import parent_arrays

FIELDS = ("size", "heavy", "apex", "light_size", "gamma", "wc", "light_depth", "light_height", "rld")


def assert_matches_oracle(t: RootedTree):
    h = decompose(t)
    ref = naive_decomposition(t)
    for name in FIELDS:
        assert getattr(h, name).tolist() == ref[name], name
    for u in range(t.n):
        assert h.light_children(u) == ref["light"][u]


def test_path_of_five():
    t = RootedTree((-1, 0, 1, 2, 3), 0)
    h = decompose(t)
    assert h.size.tolist() == [5, 4, 3, 2, 1]
    assert h.apex.tolist() == [True, False, False, False, False]
    assert h.gamma.tolist() == [2, 1, 1, 1, 1]
    assert h.wc.tolist() == [1] * 5
    assert h.rld.tolist() == [0] * 5
    assert h.heavy_path(0) == [0, 1, 2, 3, 4]


def test_star_of_five():
    t = RootedTree((-1, 0, 0, 0, 0), 0)
    h = decompose(t)
    assert h.heavy[0] == 1
    assert (h.gamma[0], h.wc[0]) == (2, 1)
    assert h.rld.tolist() == [0, 0, 1, 1, 1]
    assert h.light_children(0) == [2, 3, 4]


def test_single_node():
    h = decompose(RootedTree((-1,), 0))
    assert h.size.tolist() == [1] and bool(h.apex[0])
    assert (h.light_height[0], h.gamma[0], h.wc[0], h.rld[0]) == (0, 1, 1, 0)


@pytest.mark.parametrize("n", range(1, 8))
def test_all_small_trees_match_oracle(n):
    for t in enumerate_parent_arrays(n):
        assert_matches_oracle(t)


@given(parent_arrays(max_n=60))
def test_random_trees_match_oracle(t):
    assert_matches_oracle(t)


@given(parent_arrays(max_n=80))
def test_structural_checks_hold(t):
    h = decompose(t)
    assert check_decomposition(h) == []
    assert check_heavy_choice(t, h) == []
    assert check_rld_rules(h) == []


@given(parent_arrays(max_n=60))
def test_parents_first_order(t):
    order = parents_first_order(t).tolist()
    assert sorted(order) == list(range(t.n)) and order[0] == t.root
    pos = {u: i for i, u in enumerate(order)}
    assert all(pos[p] < pos[v] for v, p in enumerate(t.parent) if p >= 0)


@given(parent_arrays(max_n=60))
def test_bfs_renumber_is_an_isomorphism(t):
    canon, order = bfs_renumber(t)
    order = order.tolist()
    assert canon.root == 0
    for i in range(1, t.n):
        assert order[canon.parent[i]] == t.parent[order[i]]
    # siblings keep their relative order
    for i in range(1, t.n - 1):
        if canon.parent[i] == canon.parent[i + 1]:
            assert order[i] < order[i + 1]


@given(parent_arrays(max_n=60))
def test_every_node_on_one_heavy_path(t):
    h = decompose(t)
    seen = []
    for u in np.flatnonzero(h.apex).tolist():
        seen += h.heavy_path(u)
    assert sorted(seen) == list(range(t.n))


def test_census_bound_on_deep_classes():
    # balanced binary tree has many class-2 nodes relative to n
    n = 2 ** 12 - 1
    t = RootedTree(tuple([-1] + [(i - 1) // 2 for i in range(1, n)]), 0)
    h = decompose(t)
    assert check_census(h) == []
    for k, c in zip(*np.unique(h.wc, return_counts=True)):
        assert c <= census_bound(n, int(k))


def test_rows_layout():
    h = decompose(RootedTree((-1, 0, 0), 0))
    assert list(h.rows())[0] == (0, 3, 2, 1, 1, 1, 0)
