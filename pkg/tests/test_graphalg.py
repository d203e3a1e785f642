import random

import pytest

from spatial_alex import Diagram, load_fixture
from spatial_alex.errors import NotStronglyConnected, UnbalancedColoring
from spatial_alex.graphalg import (Digraph, arborescence_count, arborescence_count_exhaustive, check_balance,
                                   every_edge_on_cycle, positive_coloring, random_digraph, random_plane_graph,
                                   strongly_connected)

PATH = Digraph((0, 1, 2), {"x": (0, 1), "y": (1, 2)})


def test_theta_connectivity_and_trees():
    d = load_fixture("theta")
    assert strongly_connected(d) and every_edge_on_cycle(d)
    assert arborescence_count(d, "v1") == 2
    assert arborescence_count(d, "v2") == 1


def test_path_graph():
    assert not strongly_connected(PATH)
    assert not every_edge_on_cycle(PATH)
    with pytest.raises(NotStronglyConnected):
        positive_coloring(PATH)
    assert arborescence_count(PATH, 2) == 0


def test_positive_colorings():
    for name in ("theta", "fig5", "circle", "hopf"):
        d = load_fixture(name)
        c = positive_coloring(d)
        check_balance(d, c)
        assert all(v > 0 for v in c.values())
    assert positive_coloring(load_fixture("circle")) == {"t": 1}


def test_unbalanced_coloring():
    with pytest.raises(UnbalancedColoring):
        check_balance(load_fixture("theta"), {"a": 1, "b": 1, "c": 1})


def test_matrix_tree_against_brute_force():
    rng = random.Random(3)
    for _ in range(60):
        g = random_digraph(rng, 6)
        for root in g.nodes:
            assert arborescence_count(g, root) == arborescence_count_exhaustive(g, root)


def test_random_plane_graphs_are_valid():
    rng = random.Random(5)
    for _ in range(20):
        g = random_plane_graph(rng)
        assert isinstance(g, Diagram) and strongly_connected(g)
        assert 2 <= len(g.vertices) <= 6 and not g.crossings
