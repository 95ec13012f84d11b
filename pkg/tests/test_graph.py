import math
from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from labelforest.graph import (
    FAMILIES,
    CycleError,
    DuplicateEdgeError,
    EndpointError,
    Forest,
    GenSpec,
    HeaderError,
    RootedTree,
    attach_imaginary_root,
    enumerate_parent_arrays,
    format_forest,
    gen_tree,
    make_forest,
    oracle_adjacent,
    parse_forest,
    tree_to_forest,
    validate_forest,
)

from .strategies import forests, parent_arrays


def components(f: Forest) -> list[set[int]]:
    adj = f.adjacency()
    seen = set()
    out = []
    for r in range(f.n):
        if r in seen:
            continue
        comp = {r}
        queue = deque([r])
        while queue:
            for v in adj[queue.popleft()]:
                if v not in comp:
                    comp.add(v)
                    queue.append(v)
        seen |= comp
        out.append(comp)
    return out


# -- parsing ---------------------------------------------------------------------


def test_parse_single_node():
    assert parse_forest("1\n") == Forest(1, ())


def test_parse_path():
    f = parse_forest("3\n0 1\n1 2\n")
    assert f.n == 3 and set(f.edges) == {(0, 1), (1, 2)}


def test_parse_cycle_rejected():
    with pytest.raises(CycleError):
        parse_forest("3\n0 1\n1 2\n2 0\n")


@pytest.mark.parametrize("text, error", [
    ("", HeaderError),
    ("0\n", HeaderError),
    ("x\n", HeaderError),
    ("2\n0 2\n", EndpointError),
    ("2\n1 1\n", CycleError),
    ("3\n0 1\n1 0\n", DuplicateEdgeError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_forest(text)


def test_parse_error_carries_line_number():
    with pytest.raises(EndpointError) as info:
        parse_forest("# header\n3\n0 1\n1 7\n")
    assert "line 4" in str(info.value)


def test_parse_ignores_comments_and_blank_lines():
    assert parse_forest("# c\n\n2\n# edge\n1 0\n") == Forest(2, ((0, 1),))


@given(forests())
def test_format_parse_round_trip(f):
    g = parse_forest(format_forest(f))
    assert g.n == f.n and set(g.edges) == set(f.edges)


# -- imaginary root ------------------------------------------------------------------


def test_imaginary_root_single_node():
    t = attach_imaginary_root(Forest(1, ()))
    assert t.n == 2 and t.root == 1 and list(t.parent) == [1, -1]
    assert list(t.real) == [True, False]


def test_imaginary_root_two_isolated_nodes():
    t = attach_imaginary_root(Forest(2, ()))
    assert list(t.parent) == [2, 2, -1]


def test_imaginary_root_path_keeps_non_adjacency():
    f = parse_forest("3\n0 1\n1 2\n")
    t = attach_imaginary_root(f)
    assert t.n == 4
    assert not oracle_adjacent(f, 0, 2) and not t.adjacent(0, 2)


@given(forests())
def test_imaginary_root_preserves_real_adjacency(f):
    t = attach_imaginary_root(f)
    assert t.n == f.n + 1 and not t.real[f.n]
    for u in range(f.n):
        for v in range(f.n):
            assert t.adjacent(u, v) == oracle_adjacent(f, u, v)
    # one component root per component, each its smallest node
    roots = sorted(u for u in range(f.n) if t.parent[u] == f.n)
    assert roots == sorted(min(c) for c in components(f))


@given(parent_arrays())
def test_tree_to_forest_inverts_parent_relation(t):
    f = tree_to_forest(t)
    validate_forest(f)
    assert len(f.edges) == t.n - 1
    for u in range(t.n):
        for v in range(t.n):
            assert oracle_adjacent(f, u, v) == t.adjacent(u, v)


# -- oracle -------------------------------------------------------------------------------


def test_oracle_examples():
    f = parse_forest("3\n0 1\n1 2\n")
    assert oracle_adjacent(f, 0, 1) and oracle_adjacent(f, 1, 0)
    assert not oracle_adjacent(f, 0, 2)
    assert not oracle_adjacent(f, 1, 1)


def test_oracle_rejects_out_of_range():
    with pytest.raises(IndexError):
        oracle_adjacent(Forest(1, ()), 0, 1)


# -- generators ------------------------------------------------------------------------


def test_gen_path_and_star():
    assert set(gen_tree(GenSpec("path", 4, 7)).edges) == {(0, 1), (1, 2), (2, 3)}
    assert set(gen_tree(GenSpec("star", 4, 7)).edges) == {(0, 1), (0, 2), (0, 3)}


def test_gen_is_deterministic():
    a = gen_tree(GenSpec("uniform-prufer", 5, 11))
    b = gen_tree(GenSpec("uniform-prufer", 5, 11))
    assert a == b and a.n == 5


@pytest.mark.parametrize("family", FAMILIES)
@given(n=st.integers(1, 300), seed=st.integers(0, 2 ** 32))
def test_generated_trees_are_valid(family, n, seed):
    f = gen_tree(GenSpec(family, n, seed))
    validate_forest(f)
    assert f.n == n and len(f.edges) == n - 1


def test_gen_unknown_family():
    with pytest.raises(ValueError):
        gen_tree(GenSpec("lobster", 5, 0))


def test_prufer_is_uniform_on_small_trees():
    # Cayley: 4^2 = 16 labelled trees on 4 nodes, each equally likely
    counts: dict = {}
    for seed in range(3200):
        e = gen_tree(GenSpec("uniform-prufer", 4, seed)).edges
        counts[frozenset(e)] = counts.get(frozenset(e), 0) + 1
    assert len(counts) == 16
    assert min(counts.values()) > 120 and max(counts.values()) < 280


# -- enumeration -------------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_count(n):
    trees = list(enumerate_parent_arrays(n))
    assert len(trees) == math.factorial(n - 1)
    assert len({t.parent for t in trees}) == len(trees)
    for t in trees:
        assert all(0 <= p < i for i, p in enumerate(t.parent) if i)


def test_enumeration_small_cases():
    assert [t.parent for t in enumerate_parent_arrays(1)] == [(-1,)]
    assert {t.parent for t in enumerate_parent_arrays(3)} == {(-1, 0, 0), (-1, 0, 1)}


def test_make_forest_normalizes_edges():
    assert make_forest(3, [(2, 1), (0, 1)]).edges == ((1, 2), (0, 1))


def test_rooted_tree_defaults_to_all_real():
    assert list(RootedTree((-1, 0), 0).real) == [True, True]
