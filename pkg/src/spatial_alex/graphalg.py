"""Directed-graph services on the underlying graph of a diagram.

Crossings are transparent: each edge of the spatial graph becomes one directed
edge between its end vertices. A closed edge with no vertices becomes a
self-loop on a private node.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .diagram import Diagram
from .errors import NotStronglyConnected, UnbalancedColoring


@dataclass(frozen=True)
class Digraph:
    nodes: tuple
    edges: dict  # edge id -> (tail, head)

    def out_edges(self):
        out = {n: [] for n in self.nodes}
        for e, (u, v) in self.edges.items():
            out[u].append((e, v))
        return out


def underlying_digraph(d) -> Digraph:
    if isinstance(d, Digraph):
        return d
    nodes = [v.id for v in d.vertices]
    edges = {}
    for e in d.edges:
        path = d.edge_arcs[e]
        if path and d.tail[path[0]][0] in d.nodes and d.nodes[d.tail[path[0]][0]].kind == "vertex":
            edges[e] = (d.tail[path[0]][0], d.head[path[-1]][0])
        else:
            node = ("loop", e)
            nodes.append(node)
            edges[e] = (node, node)
    return Digraph(tuple(nodes), edges)


def _reach(g: Digraph, start, reverse=False):
    adj = {n: [] for n in g.nodes}
    for u, v in g.edges.values():
        if reverse:
            u, v = v, u
        adj[u].append(v)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def strongly_connected(d) -> bool:
    g = underlying_digraph(d)
    if not g.nodes:
        return False
    root = g.nodes[0]
    everything = set(g.nodes)
    return _reach(g, root) == everything and _reach(g, root, reverse=True) == everything


def every_edge_on_cycle(d) -> bool:
    g = underlying_digraph(d)
    return all(u in _reach(g, v) for u, v in g.edges.values())


def _path(g: Digraph, src, dst):
    """Edge ids of a shortest directed path src -> dst, or None."""
    out = g.out_edges()
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for e, y in out[x]:
            if y not in prev:
                prev[y] = (e, x)
                queue.append(y)
    if dst not in prev:
        return None
    path = []
    x = dst
    while prev[x] is not None:
        e, x = prev[x]
        path.append(e)
    return path[::-1]


def check_balance(d, coloring) -> None:
    g = underlying_digraph(d)
    net = {n: Fraction(0) for n in g.nodes}
    for e, (u, v) in g.edges.items():
        c = Fraction(coloring[e])
        net[u] -= c
        net[v] += c
    bad = [n for n, x in net.items() if x != 0]
    if bad:
        raise UnbalancedColoring(f"coloring is unbalanced at {bad[0]!r}")


def positive_coloring(d) -> dict:
    """Balanced coloring with positive integer values, built by cycle augmentation."""
    g = underlying_digraph(d)
    color = {e: 0 for e in g.edges}
    for e, (u, v) in g.edges.items():
        if color[e] > 0:
            continue
        path = _path(g, v, u)
        if path is None:
            raise NotStronglyConnected(f"edge {e!r} lies on no directed cycle")
        cycle = [e] + path
        bump = 1 + max(max(-color[x], 0) for x in cycle)
        for x in cycle:
            color[x] += bump
    return color


def arborescence_count(d, root) -> int:
    """Spanning arborescences oriented away from ``root`` (directed matrix-tree theorem)."""
    g = underlying_digraph(d)
    others = [n for n in g.nodes if n != root]
    idx = {n: i for i, n in enumerate(others)}
    k = len(others)
    lap = [[Fraction(0)] * k for _ in range(k)]
    for u, v in g.edges.values():
        if u == v or v == root:
            continue
        lap[idx[v]][idx[v]] += 1
        if u != root:
            lap[idx[u]][idx[v]] -= 1
    det = Fraction(1)
    for col in range(k):
        piv = next((r for r in range(col, k) if lap[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            lap[col], lap[piv] = lap[piv], lap[col]
            det = -det
        det *= lap[col][col]
        for r in range(col + 1, k):
            f = lap[r][col] / lap[col][col]
            if f:
                lap[r] = [a - f * b for a, b in zip(lap[r], lap[col])]
    return int(det)


def arborescence_count_exhaustive(d, root) -> int:
    """Brute force: every non-root node picks one incoming edge; keep acyclic choices."""
    g = underlying_digraph(d)
    others = [n for n in g.nodes if n != root]
    incoming = {n: [u for u, v in g.edges.values() if v == n and u != n] for n in others}
    count = 0
    for choice in product(*(incoming[n] for n in others)):
        parent = dict(zip(others, choice))
        ok = True
        for n in others:
            seen = set()
            while n != root:
                if n in seen:
                    ok = False
                    break
                seen.add(n)
                n = parent[n]
            if not ok:
                break
        count += ok
    return count


# ------------------------------------------------------------ random corpora
def random_digraph(rng: random.Random, max_nodes: int = 8) -> Digraph:
    n = rng.randint(1, max_nodes)
    nodes = tuple(range(n))
    m = rng.randint(0, 2 * n + 2)
    edges = {f"e{i}": (rng.randrange(n), rng.randrange(n)) for i in range(m)}
    return Digraph(nodes, edges)


def _ccw(node):
    if node["type"] == "vertex":
        return [(a, 0) for a in reversed(node["out"])] + [(a, 1) for a in node["in"]]
    return [(node["sw"], 1), (node["se"], 1), (node["ne"], 0), (node["nw"], 0)]


def _set_ccw(node, ccw):
    """Store a ccw half-edge list on a vertex; None if in/out blocks are not contiguous."""
    n = len(ccw)
    for r in range(n):
        rot = ccw[r:] + ccw[:r]
        ends = [e for _, e in rot]
        k = ends.index(1) if 1 in ends else n
        if 0 in ends[:1] and all(e == 0 for e in ends[:k]) and all(e == 1 for e in ends[k:]) and k < n:
            node["out"] = [a for a, _ in reversed(rot[:k])]
            node["in"] = [a for a, _ in rot[k:]]
            return node
    return None


def add_chord(data: dict, rng: random.Random) -> dict | None:
    """Insert a new edge inside a random face between two distinct vertices."""
    d = Diagram.from_dict(data)
    nodes = {n["id"]: n for n in data["nodes"]}
    orbits = d.face_orbits()
    orbit = rng.choice(orbits)
    sectors = []  # (vertex id, half-edge after which to insert in ccw order)
    for h in orbit:
        far = (h[0], 1 - h[1])
        nid = d.head[h[0]][0] if h[1] == 0 else d.tail[h[0]][0]
        nxt = d.rotation[nid][(d.rotation[nid].index(far) - 1) % len(d.rotation[nid])]
        if nodes[nid]["type"] == "vertex":
            sectors.append((nid, nxt))
    if len(sectors) < 2:
        return None
    (x, hx), (y, hy) = rng.sample(sectors, 2)
    if x == y:
        return None
    used = {a["id"] for a in data["arcs"]} | {e["id"] for e in data["edges"]}
    k = len(used)
    while f"e{k}" in used:
        k += 1
    new = f"e{k}"
    out = {**data, "nodes": [dict(n) for n in data["nodes"]]}
    nmap = {n["id"]: n for n in out["nodes"]}
    for nid, after, end in ((x, hx, 0), (y, hy, 1)):
        ccw = _ccw(nmap[nid])
        i = ccw.index(after)
        ccw.insert(i + 1, (new, end))
        if _set_ccw(nmap[nid], ccw) is None:
            return None
    out["edges"] = list(data["edges"]) + [{"id": new}]
    out["arcs"] = list(data["arcs"]) + [{"id": new, "edge": new}]
    return out


def subdivide(data: dict, rng: random.Random) -> dict:
    """Split a random vertex-to-vertex edge by a new 1-in/1-out vertex."""
    arcs = [a["id"] for a in data["arcs"]]
    a = rng.choice(arcs)
    used = set(arcs) | {e["id"] for e in data["edges"]} | {n["id"] for n in data["nodes"]}
    k = len(used)
    while f"e{k}" in used or f"v{k}" in used:
        k += 1
    new_arc, new_v = f"e{k}", f"v{k}"
    out = {**data, "nodes": [dict(n) for n in data["nodes"]]}
    for n in out["nodes"]:
        if n["type"] == "vertex" and a in n["in"]:
            n["in"] = [new_arc if x == a else x for x in n["in"]]
        elif n["type"] == "crossing":
            for s in ("sw", "se"):
                if n[s] == a:
                    n[s] = new_arc
    edge_of = {x["id"]: x["edge"] for x in data["arcs"]}
    out["nodes"].append({"id": new_v, "type": "vertex", "in": [a], "out": [new_arc]})
    out["arcs"] = list(data["arcs"]) + [{"id": new_arc, "edge": new_arc}]
    out["edges"] = list(data["edges"]) + [{"id": new_arc}]
    if len([x for x in data["arcs"] if x["edge"] == edge_of[a]]) > 1:
        from .diagram import rebuild_edges

        out, _ = rebuild_edges(out)
    return out


def random_plane_graph(rng: random.Random, max_vertices: int = 6, steps: int = 6) -> Diagram:
    """Random strongly connected plane transverse graph diagram."""
    data = {
        "edges": [{"id": "e0"}, {"id": "e1"}],
        "arcs": [{"id": "e0", "edge": "e0"}, {"id": "e1", "edge": "e1"}],
        "nodes": [{"id": "v0", "type": "vertex", "in": ["e1"], "out": ["e0"]},
                  {"id": "v1", "type": "vertex", "in": ["e0"], "out": ["e1"]}],
        "free_loops": [], "outer": {"arc": "e0", "side": "left"}, "nesting": [],
    }
    for _ in range(steps):
        nverts = len(data["nodes"])
        if nverts < max_vertices and rng.random() < 0.5:
            data = subdivide(data, rng)
        else:
            for _ in range(10):
                cand = add_chord(data, rng)
                if cand is not None:
                    data = cand
                    break
    return Diagram.from_dict(data)
