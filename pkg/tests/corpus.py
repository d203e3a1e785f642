"""Seeded diagram corpora shared by the test modules."""

from functools import lru_cache
import random

from spatial_alex import load_fixture
from spatial_alex.fixtures import NAMES
from spatial_alex.graphalg import random_digraph, random_plane_graph
from spatial_alex.moves import fuzz


def fixtures():
    return [load_fixture(n) for n in NAMES]


@lru_cache(maxsize=None)
def structural_corpus():
    """200 fuzz diagrams: 5 fixtures x 8 seeds, sampled every 5 moves."""
    out = []
    for name in NAMES:
        for seed in range(8):
            run = fuzz(load_fixture(name), seed, 25, framed=seed % 2 == 0)
            out += run.diagrams[5::5]
    return tuple(out)


@lru_cache(maxsize=None)
def small_corpus():
    """50 fuzz diagrams with at most 12 crossings."""
    out = []
    for name in NAMES:
        for seed in range(10):
            run = fuzz(load_fixture(name), 500 + seed, 30, framed=seed % 2 == 1, max_crossings=12)
            out.append(run.diagrams[-1])
    return tuple(out)


@lru_cache(maxsize=None)
def plane_graphs(n=20, seed=7):
    rng = random.Random(seed)
    return tuple(random_plane_graph(rng, max_vertices=6) for _ in range(n))


def weakly_connected(g):
    nodes = set(g.nodes)
    adj = {x: set() for x in nodes}
    for u, v in g.edges.values():
        adj[u].add(v)
        adj[v].add(u)
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        for y in adj[stack.pop()] - seen:
            seen.add(y)
            stack.append(y)
    return seen == nodes


@lru_cache(maxsize=None)
def connected_digraphs(n=100, seed=11):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        g = random_digraph(rng, max_nodes=8)
        if weakly_connected(g):
            out.append(g)
    return tuple(out)
