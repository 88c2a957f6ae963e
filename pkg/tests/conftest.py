import pytest

from hodgelab import WeightedGraph, build_clique_complex, drop_simplices


def unit_graph(vertices, edges):
    return WeightedGraph({v: 1.0 for v in vertices}, {e: 1.0 for e in edges})


@pytest.fixture
def K3():
    return build_clique_complex(unit_graph("abc", [("a", "b"), ("a", "c"), ("b", "c")]), 2)


@pytest.fixture
def K4():
    edges = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]
    return build_clique_complex(unit_graph("abcd", edges), 3)


@pytest.fixture
def single_edge():
    return build_clique_complex(unit_graph("ab", [("a", "b")]), 1)


@pytest.fixture
def path3():
    return build_clique_complex(unit_graph("abc", [("a", "b"), ("b", "c")]), 2)


@pytest.fixture
def four_cycle():
    edges = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    return build_clique_complex(unit_graph("abcd", edges), 2)


@pytest.fixture
def hollow_triangle(K3):
    return drop_simplices(K3, 2, lambda s: False)
