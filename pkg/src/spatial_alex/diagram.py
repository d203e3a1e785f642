"""Transverse graph diagrams as combinatorial planar maps.

A diagram is a set of nodes (transverse vertices and signed double-point
crossings) joined by oriented arcs, plus crossingless free loops.  Each arc
belongs to an edge of the spatial graph; an edge is a path of arcs running
straight through crossings.

Half-edges are ``(arc_id, end)`` with ``end == 0`` at the arc's tail node and
``end == 1`` at its head node.  Counterclockwise rotation at a vertex is the
outgoing arcs right-to-left followed by the incoming arcs left-to-right; at a
crossing it is ``sw, se, ne, nw``.  The face on the left of a half-edge ``h``
is traced by ``h -> cw(twin(h))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    DanglingArc,
    InconsistentOuter,
    MalformedInput,
    MarkedRegionsCoincide,
    NonPlanarMap,
    SinkOrSourceVertex,
)

SLOTS = ("sw", "se", "ne", "nw")
STRAIGHT = {"sw": "ne", "se": "nw"}


@dataclass(frozen=True)
class Vertex:
    id: Any
    ins: tuple
    outs: tuple

    kind = "vertex"


@dataclass(frozen=True)
class Crossing:
    id: Any
    sign: str
    sw: Any
    se: Any
    ne: Any
    nw: Any

    kind = "crossing"

    @property
    def over_in(self):
        """Incoming arc of the over-strand."""
        return self.sw if self.sign == "pos" else self.se

    @property
    def over_out(self):
        return self.ne if self.sign == "pos" else self.nw


@dataclass(frozen=True)
class FreeLoop:
    id: Any
    edge: Any
    orientation: str
    face: dict | None = None


@dataclass(frozen=True)
class Component:
    nodes: tuple
    arcs: tuple
    loops: tuple


def _face_ref(obj, where):
    if obj is None:
        return None
    if not isinstance(obj, dict) or "side" not in obj or not ({"arc", "loop"} & obj.keys()):
        raise MalformedInput("face reference must be {'arc'|'loop': id, 'side': 'left'|'right'}", where)
    if obj["side"] not in ("left", "right"):
        raise MalformedInput(f"bad side {obj['side']!r}", where)
    return dict(obj)


class Diagram:
    """Immutable, validated transverse graph diagram."""

    def __init__(self, edges, arcs, nodes, free_loops=(), outer=None, nesting=(), basis=None):
        self.edges = tuple(edges)
        self.arcs = dict(arcs)  # arc id -> edge id
        self.nodes = dict((n.id, n) for n in nodes)
        self.free_loops = dict((fl.id, fl) for fl in free_loops)
        self.outer = outer
        self.nesting = tuple(nesting)
        self.basis = tuple(basis) if basis is not None else None
        self._validate_structure()
        self._build_map()

    # ------------------------------------------------------------------ io
    @classmethod
    def from_dict(cls, data: dict) -> "Diagram":
        if not isinstance(data, dict):
            raise MalformedInput("top level must be an object")
        try:
            edges = [e["id"] for e in data.get("edges", [])]
            arcs = []
            for i, a in enumerate(data.get("arcs", [])):
                arcs.append((a["id"], a["edge"]))
            nodes = []
            for i, n in enumerate(data.get("nodes", [])):
                where = f"nodes[{i}]"
                if n.get("type") == "vertex":
                    nodes.append(Vertex(n["id"], tuple(n["in"]), tuple(n["out"])))
                elif n.get("type") == "crossing":
                    if n.get("sign") not in ("pos", "neg"):
                        raise MalformedInput(f"crossing sign must be 'pos' or 'neg', got {n.get('sign')!r}", where)
                    nodes.append(Crossing(n["id"], n["sign"], n["sw"], n["se"], n["ne"], n["nw"]))
                else:
                    raise MalformedInput(f"unknown node type {n.get('type')!r}", where)
            loops = []
            for i, fl in enumerate(data.get("free_loops", [])):
                where = f"free_loops[{i}]"
                if fl.get("orientation") not in ("ccw", "cw"):
                    raise MalformedInput("orientation must be 'ccw' or 'cw'", where)
                loops.append(FreeLoop(fl["id"], fl["edge"], fl["orientation"], _face_ref(fl.get("face"), where)))
            outer = _face_ref(data.get("outer"), "outer")
            nesting = []
            for i, ent in enumerate(data.get("nesting", [])):
                where = f"nesting[{i}]"
                nesting.append({"outer": _face_ref(ent["outer"], where),
                                "face": _face_ref(ent.get("face"), where)})
        except KeyError as exc:
            raise MalformedInput(f"missing field {exc.args[0]!r}") from None
        except TypeError as exc:
            raise MalformedInput(str(exc)) from None
        if len(set(edges)) != len(edges):
            raise MalformedInput("duplicate edge id", "edges")
        if len({a for a, _ in arcs}) != len(arcs):
            raise MalformedInput("duplicate arc id", "arcs")
        return cls(edges, arcs, nodes, loops, outer, nesting, data.get("basis"))

    def to_dict(self) -> dict:
        nodes = []
        for n in self.nodes.values():
            if isinstance(n, Vertex):
                nodes.append({"id": n.id, "type": "vertex", "in": list(n.ins), "out": list(n.outs)})
            else:
                nodes.append({"id": n.id, "type": "crossing", "sign": n.sign,
                              "sw": n.sw, "se": n.se, "ne": n.ne, "nw": n.nw})
        out = {
            "edges": [{"id": e} for e in self.edges],
            "arcs": [{"id": a, "edge": e} for a, e in self.arcs.items()],
            "nodes": nodes,
            "free_loops": [{"id": fl.id, "edge": fl.edge, "orientation": fl.orientation, "face": fl.face}
                           for fl in self.free_loops.values()],
            "outer": self.outer,
            "nesting": [dict(n) for n in self.nesting],
        }
        if self.basis is not None:
            out["basis"] = list(self.basis)
        return out

    # --------------------------------------------------------- validation
    def _validate_structure(self):
        edge_set = set(self.edges)
        for a, e in self.arcs.items():
            if e not in edge_set:
                raise MalformedInput(f"arc {a!r} references unknown edge {e!r}", "arcs")
        self.tail: dict = {}
        self.head: dict = {}
        for n in self.nodes.values():
            if isinstance(n, Vertex):
                if not n.ins or not n.outs:
                    raise SinkOrSourceVertex(f"vertex {n.id!r} needs incoming and outgoing arcs", "nodes")
                ins = [(a, ("in", i)) for i, a in enumerate(n.ins)]
                outs = [(a, ("out", i)) for i, a in enumerate(n.outs)]
            else:
                ins = [(n.sw, "sw"), (n.se, "se")]
                outs = [(n.ne, "ne"), (n.nw, "nw")]
            for a, slot in ins:
                if a not in self.arcs:
                    raise DanglingArc(f"node {n.id!r} uses unknown arc {a!r}", "nodes")
                if a in self.head:
                    raise DanglingArc(f"arc {a!r} enters two nodes", "nodes")
                self.head[a] = (n.id, slot)
            for a, slot in outs:
                if a not in self.arcs:
                    raise DanglingArc(f"node {n.id!r} uses unknown arc {a!r}", "nodes")
                if a in self.tail:
                    raise DanglingArc(f"arc {a!r} leaves two nodes", "nodes")
                self.tail[a] = (n.id, slot)
        for a in self.arcs:
            if a not in self.head or a not in self.tail:
                raise DanglingArc(f"arc {a!r} is not attached at both ends", "arcs")
        for n in self.nodes.values():
            if isinstance(n, Crossing):
                for i, o in STRAIGHT.items():
                    if self.arcs[getattr(n, i)] != self.arcs[getattr(n, o)]:
                        raise MalformedInput(f"crossing {n.id!r} changes edge along a strand", "nodes")
        loop_edges = {}
        for fl in self.free_loops.values():
            if fl.edge not in edge_set:
                raise MalformedInput(f"free loop {fl.id!r} references unknown edge", "free_loops")
            if fl.id in self.arcs:
                raise MalformedInput(f"free loop id {fl.id!r} clashes with an arc id", "free_loops")
            loop_edges[fl.edge] = fl.id
        # each edge: a single path of arcs (or a closed cycle through crossings)
        by_edge: dict = {e: [] for e in self.edges}
        for a, e in self.arcs.items():
            by_edge[e].append(a)
        self.edge_arcs: dict = {}
        for e in self.edges:
            arcs = by_edge[e]
            if not arcs:
                if e not in loop_edges:
                    raise MalformedInput(f"edge {e!r} has no arcs", "edges")
                if list(loop_edges).count(e) > 1:
                    raise MalformedInput(f"edge {e!r} used by two free loops", "edges")
                self.edge_arcs[e] = ()
                continue
            if e in loop_edges:
                raise MalformedInput(f"edge {e!r} is both a free loop and a path", "edges")
            starts = [a for a in arcs if isinstance(self.nodes[self.tail[a][0]], Vertex)]
            if len(starts) > 1:
                raise MalformedInput(f"edge {e!r} is not a single path", "edges")
            start = starts[0] if starts else arcs[0]
            path, a = [], start
            while True:
                path.append(a)
                node, slot = self.head[a]
                if isinstance(self.nodes[node], Vertex):
                    break
                a = getattr(self.nodes[node], STRAIGHT[slot])
                if a == start:
                    break
            if starts and not isinstance(self.nodes[self.head[path[-1]][0]], Vertex):
                raise MalformedInput(f"edge {e!r} does not end at a vertex", "edges")
            if sorted(map(repr, path)) != sorted(map(repr, arcs)):
                raise MalformedInput(f"edge {e!r} is not a single path", "edges")
            self.edge_arcs[e] = tuple(path)

    def _build_map(self):
        rot = {}
        for n in self.nodes.values():
            if isinstance(n, Vertex):
                rot[n.id] = [(a, 0) for a in reversed(n.outs)] + [(a, 1) for a in n.ins]
            else:
                rot[n.id] = [(n.sw, 1), (n.se, 1), (n.ne, 0), (n.nw, 0)]
        self.rotation = rot
        pos = {}
        for nid, hs in rot.items():
            for i, h in enumerate(hs):
                pos[h] = (nid, i)
        self._pos = pos
        # faces on the left of each half-edge
        face_of = {}
        orbits = []
        for a in self.arcs:
            for end in (0, 1):
                h = (a, end)
                if h in face_of:
                    continue
                fid = len(orbits)
                orbit = []
                while h not in face_of:
                    face_of[h] = fid
                    orbit.append(h)
                    nid, i = pos[(h[0], 1 - h[1])]
                    h = rot[nid][(i - 1) % len(rot[nid])]
                orbits.append(tuple(orbit))
        self._face_of = face_of
        self._orbits = orbits
        self._components = self._find_components()
        for comp in self._components:
            if not comp.nodes:
                continue
            hs = {(a, e) for a in comp.arcs for e in (0, 1)}
            nf = len({face_of[h] for h in hs})
            if len(comp.nodes) - len(comp.arcs) + nf != 2:
                raise NonPlanarMap(f"Euler characteristic check failed for component at {comp.nodes[0]!r}")
        self._regions = self._resolve_regions()

    def _find_components(self):
        parent = {n: n for n in self.nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in self.arcs:
            ra, rb = find(self.tail[a][0]), find(self.head[a][0])
            if ra != rb:
                parent[ra] = rb
        groups: dict = {}
        for n in self.nodes:
            groups.setdefault(find(n), []).append(n)
        comps = []
        for members in groups.values():
            ms = set(members)
            arcs = tuple(a for a in self.arcs if self.tail[a][0] in ms)
            comps.append(Component(tuple(members), arcs, ()))
        for fl in self.free_loops.values():
            comps.append(Component((), (), (fl.id,)))
        return comps

    # ------------------------------------------------------------ regions
    def _local_face(self, ref):
        """Face key for a face reference: ('f', orbit) or ('L', loop, 'in'|'out')."""
        if "loop" in ref:
            fl = self.free_loops.get(ref["loop"])
            if fl is None:
                raise InconsistentOuter(f"unknown loop {ref['loop']!r}")
            left_inside = fl.orientation == "ccw"
            inside = (ref["side"] == "left") == left_inside
            return ("L", fl.id, "in" if inside else "out")
        if ref["arc"] not in self.arcs:
            raise InconsistentOuter(f"unknown arc {ref['arc']!r}")
        return ("f", self._face_of[(ref["arc"], 0 if ref["side"] == "left" else 1)])

    def _resolve_regions(self):
        parent: dict = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        infinity = ("INF",)
        find(infinity)
        comp_outer: dict = {}
        node_comps = [c for c in self._components if c.nodes]
        for i, comp in enumerate(self._components):
            if comp.loops:
                comp_outer[i] = ("L", comp.loops[0], "out")
        declared = []
        if self.outer is not None:
            declared.append((self._local_face(self.outer), None))
        for ent in self.nesting:
            declared.append((self._local_face(ent["outer"]), ent["face"]))
        for key, _ in declared:
            if key[0] == "L":
                continue
            idx = self._component_of_face(key)
            if idx in comp_outer and comp_outer[idx] != key:
                raise InconsistentOuter("two outer faces declared for one component")
            comp_outer[idx] = key
        for i, comp in enumerate(self._components):
            if i not in comp_outer:
                if len(node_comps) == 1 and comp.nodes and self.outer is None:
                    raise InconsistentOuter("diagram with nodes needs an 'outer' face")
                raise InconsistentOuter(f"component containing {(comp.nodes or comp.loops)[0]!r} has no outer face")
        self._comp_outer = comp_outer
        # nesting: merge each component's outer face into its containing face
        containing = {}
        if self.outer is not None:
            containing[self._local_face(self.outer)] = None
        for ent in self.nesting:
            containing[self._local_face(ent["outer"])] = ent["face"]
        for fl in self.free_loops.values():
            containing[("L", fl.id, "out")] = fl.face
        for key, ref in containing.items():
            union(key, infinity if ref is None else self._local_face(ref))
        # all faces
        keys = [("f", i) for i in range(len(self._orbits))]
        for fl in self.free_loops.values():
            keys += [("L", fl.id, "out"), ("L", fl.id, "in")]
        names: dict = {}
        region_of = {}
        for k in keys:
            r = find(k)
            if r not in names:
                names[r] = f"r{len(names)}"
            region_of[k] = names[r]
        if find(infinity) not in names:
            names[find(infinity)] = f"r{len(names)}"
        self._region_of = region_of
        self.unbounded_region = names[find(infinity)]
        return region_of

    def _component_of_face(self, key):
        h = self._orbits[key[1]][0]
        for i, comp in enumerate(self._components):
            if h[0] in comp.arcs:
                return i
        raise InconsistentOuter("face does not belong to any component")

    # ------------------------------------------------------------ queries
    @property
    def vertices(self):
        return [n for n in self.nodes.values() if isinstance(n, Vertex)]

    @property
    def crossings(self):
        return [n for n in self.nodes.values() if isinstance(n, Crossing)]

    def components(self):
        return list(self._components)

    def is_connected(self) -> bool:
        return len(self._components) == 1

    def is_plane(self) -> bool:
        return not self.crossings

    def edge_of(self, arc_or_loop):
        if arc_or_loop in self.arcs:
            return self.arcs[arc_or_loop]
        return self.free_loops[arc_or_loop].edge

    def left_region(self, arc_or_loop) -> str:
        if arc_or_loop in self.free_loops:
            return self._region_of[self._local_face({"loop": arc_or_loop, "side": "left"})]
        return self._region_of[("f", self._face_of[(arc_or_loop, 0)])]

    def right_region(self, arc_or_loop) -> str:
        if arc_or_loop in self.free_loops:
            return self._region_of[self._local_face({"loop": arc_or_loop, "side": "right"})]
        return self._region_of[("f", self._face_of[(arc_or_loop, 1)])]

    def region_of_halfedge(self, h) -> str:
        return self._region_of[("f", self._face_of[h])]

    def face_orbits(self):
        """Face orbits of half-edges (local to their component)."""
        return list(self._orbits)

    def local_face_of(self, h) -> int:
        return self._face_of[h]

    def component_outer_key(self, index):
        return self._comp_outer[index]

    def local_region(self, key) -> str:
        return self._region_of[key]

    def vertex_sectors(self, v: Vertex):
        """(between-incoming regions, between-outgoing regions, the two gap regions)."""
        between_in = [self.region_of_halfedge((a, 1)) for a in v.ins[:-1]]
        between_out = [self.region_of_halfedge((a, 0)) for a in v.outs[1:]]
        gaps = (self.region_of_halfedge((v.outs[0], 0)), self.region_of_halfedge((v.ins[-1], 1)))
        return between_in, between_out, gaps

    def crossing_corners(self, c: Crossing) -> dict:
        return {
            "N": self.region_of_halfedge((c.ne, 0)),
            "W": self.region_of_halfedge((c.nw, 0)),
            "S": self.region_of_halfedge((c.sw, 1)),
            "E": self.region_of_halfedge((c.se, 1)),
        }

    def base_candidates(self):
        return list(self.arcs) + list(self.free_loops)

    def default_base(self):
        """First arc or loop with different regions on its two sides."""
        cands = self.base_candidates()
        return next((a for a in cands if self.left_region(a) != self.right_region(a)), cands[0])

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return (f"Diagram({len(self.vertices)} vertices, {len(self.crossings)} crossings, "
                f"{len(self.arcs)} arcs, {len(self.free_loops)} free loops)")


def parse(text: str) -> Diagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return Diagram.from_dict(data)


def serialize(d: Diagram) -> str:
    return json.dumps(d.to_dict(), indent=2) + "\n"


def connected_components(d: Diagram) -> list[Component]:
    return d.components()


@dataclass(frozen=True)
class RegionTable:
    regular_regions: dict
    unbounded_face: str
    circle_regions: dict


def faces(d: Diagram) -> RegionTable:
    """Regular regions with their boundary half-edges, plus one circle region per vertex."""
    regular: dict = {}
    for i, orbit in enumerate(d.face_orbits()):
        regular.setdefault(d.local_region(("f", i)), []).extend(orbit)
    for fl in d.free_loops.values():
        for side in ("in", "out"):
            regular.setdefault(d.local_region(("L", fl.id, side)), []).append((fl.id, side))
    regular.setdefault(d.unbounded_region, [])
    circles = {v.id: f"o:{v.id}" for v in d.vertices}
    return RegionTable({k: tuple(v) for k, v in regular.items()}, d.unbounded_region, circles)


@dataclass(frozen=True)
class CrossingSite:
    """A member of Cr(D): a double point or an incoming edge meeting a vertex circle."""

    id: Any
    kind: str  # "pos", "neg" or "circle"
    corners: tuple  # ((label, region), ...)
    edge: Any  # over-strand edge for double points, incoming edge for circles
    node: Any
    arc: Any = None  # incoming arc for circle crossings


@dataclass(frozen=True)
class DecoratedDiagram:
    diagram: Diagram
    base: Any
    crossings: tuple
    regions: tuple
    marked: tuple

    @property
    def unmarked(self):
        return tuple(r for r in self.regions if r not in self.marked)


def decorate(d: Diagram, base_arc) -> DecoratedDiagram:
    if base_arc not in d.arcs and base_arc not in d.free_loops:
        raise MalformedInput(f"unknown base arc {base_arc!r}", "base")
    table = faces(d)
    regions = list(table.regular_regions) + list(table.circle_regions.values())
    sites = []
    for n in d.nodes.values():
        if isinstance(n, Crossing):
            corners = d.crossing_corners(n)
            sites.append(CrossingSite(n.id, n.sign, tuple(corners.items()), d.arcs[n.over_in], n.id))
    for v in d.vertices:
        for a in v.ins:
            corners = (("N", table.circle_regions[v.id]), ("W", d.left_region(a)), ("E", d.right_region(a)))
            sites.append(CrossingSite(f"{v.id}:{a}", "circle", corners, d.arcs[a], v.id, a))
    marked = (d.left_region(base_arc), d.right_region(base_arc))
    if marked[0] == marked[1]:
        raise MarkedRegionsCoincide(f"both sides of {base_arc!r} lie in region {marked[0]}")
    if d.is_connected() and len(regions) != len(sites) + 2:
        raise NonPlanarMap(f"|Re| = {len(regions)} but |Cr| + 2 = {len(sites) + 2}")
    return DecoratedDiagram(d, base_arc, tuple(sites), tuple(regions), marked)


def rebuild_edges(data: dict) -> tuple[dict, dict]:
    """Regroup arcs into edges after local surgery on a diagram dict.

    Each arc keeps its ``edge`` field as a hint of where it came from. Arcs are
    chained straight through crossings; every maximal chain becomes one edge.
    An old edge that now splits into several chains yields ids ``e.1, e.2, ...``.
    Returns the new dict and a map new edge id -> old edge id.
    """
    tail, head = {}, {}
    for n in data["nodes"]:
        if n["type"] == "vertex":
            for a in n["in"]:
                head[a] = (n, None)
            for a in n["out"]:
                tail[a] = (n, None)
        else:
            for s in ("sw", "se"):
                head[n[s]] = (n, s)
            for s in ("ne", "nw"):
                tail[n[s]] = (n, s)
    hint = {a["id"]: a["edge"] for a in data["arcs"]}
    order = [a["id"] for a in data["arcs"]]
    seen, chains = set(), []

    def walk(start):
        chain, a = [], start
        while a not in seen:
            seen.add(a)
            chain.append(a)
            node, slot = head[a]
            if slot is None:
                break
            a = node[STRAIGHT[slot]]
        return chain

    for a in order:
        if a not in seen and tail[a][1] is None:
            chains.append(walk(a))
    for a in order:
        if a not in seen:
            chains.append(walk(a))
    per_old: dict = {}
    for ch in chains:
        per_old.setdefault(hint[ch[0]], []).append(ch)
    taken = {fl["edge"] for fl in data.get("free_loops", [])}
    old_order = [e["id"] for e in data["edges"]]
    old_order += [e for e in per_old if e not in old_order]
    new_edges, origin, arc_edge = [], {}, {}
    for e in old_order:
        if e in taken:
            new_edges.append(e)
            origin[e] = e
            continue
        chs = per_old.get(e, [])
        for i, ch in enumerate(chs):
            nid = e if len(chs) == 1 else f"{e}.{i + 1}"
            while nid in taken or nid in origin:
                nid = f"{nid}'"
            new_edges.append(nid)
            origin[nid] = e
            for a in ch:
                arc_edge[a] = nid
    out = dict(data)
    out["edges"] = [{"id": e} for e in new_edges]
    out["arcs"] = [{"id": a, "edge": arc_edge[a]} for a in order]
    if "basis" in out and not set(out["basis"]) <= set(new_edges):
        del out["basis"]
    return out, origin
