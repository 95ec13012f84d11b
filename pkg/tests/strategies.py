"""Hypothesis strategies for forests and trees."""

from hypothesis import strategies as st

from labelforest.graph import Forest, RootedTree


@st.composite
def parent_arrays(draw, min_n: int = 1, max_n: int = 40) -> RootedTree:
    n = draw(st.integers(min_n, max_n))
    parent = [-1] + [draw(st.integers(0, i - 1)) for i in range(1, n)]
    return RootedTree(tuple(parent), 0)


@st.composite
def forests(draw, min_n: int = 1, max_n: int = 40) -> Forest:
    """Random forest with shuffled node names and a random edge subset."""
    n = draw(st.integers(min_n, max_n))
    perm = draw(st.permutations(range(n)))
    edges = []
    for i in range(1, n):
        if draw(st.booleans()) or draw(st.booleans()):
            j = draw(st.integers(0, i - 1))
            u, v = perm[i], perm[j]
            edges.append((min(u, v), max(u, v)))
    return Forest(n, tuple(edges))


@st.composite
def caterpillars(draw, min_n: int = 1, max_n: int = 40) -> Forest:
    n = draw(st.integers(min_n, max_n))
    spine = draw(st.integers(1, n))
    perm = draw(st.permutations(range(n)))
    edges = [(i, i + 1) for i in range(spine - 1)]
    edges += [(draw(st.integers(0, spine - 1)), i) for i in range(spine, n)]
    out = []
    for u, v in edges:
        a, b = perm[u], perm[v]
        out.append((min(a, b), max(a, b)))
    return Forest(n, tuple(out))
