"""Reidemeister moves as local surgery on combinatorial diagrams, plus a seeded fuzzer.

Every move works on a deep copy of the diagram's dict form and rebuilds a
validated :class:`Diagram`, so planarity and Euler checks run after each step.
Insertions are available anywhere their anchor makes sense; removals only fire
on an exact local pattern (including over/under data and orientations).

Arc ids are kept on the piece of a split arc whose two sides still face the
same regions outside the move's disk, so face references (``outer``, nesting,
loop containment) survive untouched.  References into faces that a move
destroys or rebuilds are first re-pointed at a surviving arc of the same face.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .diagram import Crossing, Diagram, Vertex, decorate
from .errors import InvarianceViolation, MalformedInput, OrientationIncompatible, PatternNotFound
from .lattice import HalfMonomial
from .ring import fraction_eq
from .rotation import diagram_lattice, meridian_map, rot
from .statesum import state_sum
from .invariant import normalize

KINDS = ("R1+", "R1-", "R1'", "R2", "R3", "R4over", "R4under", "R5cw", "R5ccw")
_ALIASES = {"R1−": "R1-", "R1′": "R1'", "R1p": "R1'"}
OPPOSITE = {"sw": "ne", "ne": "sw", "se": "nw", "nw": "se"}
FRAMED_FAMILIES = ("R1'", "R2", "R3", "R4")
UNFRAMED_FAMILIES = ("R1", "R2", "R3", "R4", "R5")


@dataclass(frozen=True)
class MoveSite:
    kind: str
    anchor: Mapping = field(default_factory=dict)
    direction: str = "insert"

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise MalformedInput(f"unknown move kind {self.kind!r}")
        if self.direction not in ("insert", "remove"):
            raise MalformedInput(f"direction must be 'insert' or 'remove', got {self.direction!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "anchor", dict(self.anchor))

    @property
    def family(self) -> str:
        if self.kind in ("R1+", "R1-"):
            return "R1"
        if self.kind.startswith("R4"):
            return "R4"
        if self.kind.startswith("R5"):
            return "R5"
        return self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "anchor": dict(self.anchor), "direction": self.direction}

    @classmethod
    def from_dict(cls, data: Mapping) -> "MoveSite":
        try:
            return cls(data["kind"], data.get("anchor", {}), data.get("direction", "insert"))
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad move record: {exc}") from None


@dataclass(frozen=True)
class Kink:
    """A curl created (+1) or destroyed (-1) by a move."""

    edge: Any
    side: str  # "left" or "right" of the strand
    sign: str  # "pos" or "neg"
    change: int


@dataclass(frozen=True)
class MoveResult:
    diagram: Diagram
    inverse: MoveSite | None
    kinks: tuple = ()


# ---------------------------------------------------------------- workspace
class _Work:
    """Mutable dict copy of a diagram with id bookkeeping."""

    def __init__(self, d: Diagram):
        self.d = d
        data = copy.deepcopy(d.to_dict())
        self.data = data
        self.nodes = {n["id"]: n for n in data["nodes"]}
        self.arcs = {a["id"]: a["edge"] for a in data["arcs"]}
        self.loops = {fl["id"]: fl for fl in data["free_loops"]}
        self.taken = set(self.nodes) | set(self.arcs) | set(self.loops) | set(d.edges)

    def fresh(self, stem: str) -> str:
        i = 1
        while f"{stem}{i}" in self.taken:
            i += 1
        name = f"{stem}{i}"
        self.taken.add(name)
        return name

    def new_arc(self, edge) -> str:
        a = self.fresh(f"{edge}_")
        self.arcs[a] = edge
        return a

    def new_crossing(self, sign, slots) -> str:
        c = self.fresh("x")
        self.nodes[c] = {"id": c, "type": "crossing", "sign": sign, **slots}
        return c

    def set_slot(self, where, arc):
        nid, slot = where
        node = self.nodes[nid]
        if isinstance(slot, tuple):
            node["in" if slot[0] == "in" else "out"][slot[1]] = arc
        else:
            node[slot] = arc

    def refs(self):
        """(reference dict, role) for every face reference in the diagram."""
        out = []
        if self.data.get("outer"):
            out.append((self.data["outer"], "outer"))
        for ent in self.data.get("nesting", []):
            out.append((ent["outer"], "nest"))
            if ent.get("face"):
                out.append((ent["face"], "face"))
        for fl in self.loops.values():
            if fl.get("face"):
                out.append((fl["face"], "face"))
        return out

    def reroute(self, unstable):
        """Point references on ``unstable`` arcs at a surviving arc of the same face."""
        unstable = set(unstable)
        orbits = self.d.face_orbits()
        for ref, _ in self.refs():
            if "arc" not in ref or ref["arc"] not in unstable:
                continue
            h = (ref["arc"], 0 if ref["side"] == "left" else 1)
            orbit = orbits[self.d.local_face_of(h)]
            alt = next(((a, e) for a, e in orbit if a not in unstable), None)
            if alt is None:
                raise PatternNotFound("a declared face lies entirely inside the move")
            ref["arc"], ref["side"] = alt[0], "left" if alt[1] == 0 else "right"

    def drop(self, arcs=(), nodes=()):
        for a in arcs:
            self.arcs.pop(a, None)
        for n in nodes:
            self.nodes.pop(n, None)

    def build(self) -> Diagram:
        data = dict(self.data)
        data["nodes"] = list(self.nodes.values())
        data["arcs"] = [{"id": a, "edge": e} for a, e in self.arcs.items()]
        data["free_loops"] = list(self.loops.values())
        return Diagram.from_dict(data)


def _cross(p, q):
    """Slots of a crossing of strands p, q given as (in arc, out arc, travel angle).

    Returns (slot dict, index of the strand entering at sw).
    """
    hs = []
    for k, (a_in, a_out, ang) in enumerate((p, q)):
        hs.append(((ang + 180) % 360, a_in, "in", k))
        hs.append((ang % 360, a_out, "out", k))
    hs.sort()
    for r in range(4):
        seq = hs[r:] + hs[:r]
        if [x[2] for x in seq] == ["in", "in", "out", "out"]:
            return {"sw": seq[0][1], "se": seq[1][1], "ne": seq[2][1], "nw": seq[3][1]}, seq[0][3]
    raise AssertionError("strands are not transverse")


def _sign(over_index: int, sw_index: int) -> str:
    return "pos" if over_index == sw_index else "neg"


def _end(side: str) -> int:
    if side not in ("left", "right"):
        raise MalformedInput(f"side must be 'left' or 'right', got {side!r}")
    return 0 if side == "left" else 1


def _need(anchor, *keys):
    missing = [k for k in keys if k not in anchor]
    if missing:
        raise MalformedInput(f"move anchor lacks {', '.join(missing)}")
    return [anchor[k] for k in keys]


# -------------------------------------------------------------- contraction
def _contraction_plan(d: Diagram, crossings, prefer=()):
    """Arc classes merged when ``crossings`` are erased: [(keep, first, last, members)]."""
    gone = set(crossings)
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    for c in gone:
        n = d.nodes[c]
        for i, o in (("sw", "ne"), ("se", "nw")):
            ra, rb = find(getattr(n, i)), find(getattr(n, o))
            if ra != rb:
                parent[ra] = rb
    classes: dict = {}
    for a in parent:
        classes.setdefault(find(a), []).append(a)
    plan = []
    for members in classes.values():
        members.sort(key=lambda a: list(d.arcs).index(a))
        first = [a for a in members if d.tail[a][0] not in gone]
        last = [a for a in members if d.head[a][0] not in gone]
        if not first or not last:
            raise PatternNotFound("erasing the crossings would leave a closed strand")
        keep = next((a for a in members if a in prefer), first[0])
        plan.append((keep, first[0], last[0], members))
    return plan


def _contract(w: _Work, crossings, prefer=()):
    d = w.d
    plan = _contraction_plan(d, crossings, prefer)
    w.reroute({a for keep, _, _, members in plan for a in members if a != keep})
    for keep, first, last, members in plan:
        if keep != first:
            w.set_slot(d.tail[first], keep)
        if keep != last:
            w.set_slot(d.head[last], keep)
        w.drop(arcs=[a for a in members if a != keep])
    w.drop(nodes=crossings)


# --------------------------------------------------------------------- kinks
def _kink_insert(d: Diagram, target, side: str, sign: str):
    _end(side)
    w = _Work(d)
    if target in d.free_loops:
        fl = w.loops.pop(target)
        edge = fl["edge"]
        w.arcs[target] = edge
        loop = w.new_arc(edge)
        if side == "left":
            slots = {"sw": loop, "se": target, "ne": target, "nw": loop}
        else:
            slots = {"sw": target, "se": loop, "ne": loop, "nw": target}
        x = w.new_crossing(sign, slots)
        declared = False
        for ref, role in w.refs():
            if ref.get("loop") == target:
                s = ref["side"]
                ref.clear()
                ref.update({"arc": target, "side": s})
                declared |= role in ("outer", "nest")
        if not declared:
            out_side = "right" if fl["orientation"] == "ccw" else "left"
            w.data.setdefault("nesting", []).append(
                {"outer": {"arc": target, "side": out_side}, "face": fl.get("face")})
    elif target in d.arcs:
        edge = d.arcs[target]
        loop, after = w.new_arc(edge), w.new_arc(edge)
        w.set_slot(d.head[target], after)
        if side == "left":
            slots = {"sw": loop, "se": target, "ne": after, "nw": loop}
        else:
            slots = {"sw": target, "se": loop, "ne": loop, "nw": after}
        x = w.new_crossing(sign, slots)
    else:
        raise PatternNotFound(f"no arc or free loop {target!r}")
    return w.build(), x, Kink(d.edge_of(target), side, sign, +1)


def _kink_pattern(d: Diagram, x, side=None):
    """(side, loop arc, incoming arc, outgoing arc) of a curl at crossing ``x``."""
    n = d.nodes.get(x)
    if not isinstance(n, Crossing):
        raise PatternNotFound(f"{x!r} is not a crossing")
    options = []
    if n.nw == n.sw:
        options.append(("left", n.sw, n.se, n.ne))
    if n.ne == n.se:
        options.append(("right", n.ne, n.sw, n.nw))
    if side is not None:
        options = [o for o in options if o[0] == side]
    if not options:
        raise PatternNotFound(f"crossing {x!r} is not a curl")
    return options[0]


def _kink_remove(d: Diagram, x, side=None, sign=None):
    side, loop, a_in, a_out = _kink_pattern(d, x, side)
    n = d.nodes[x]
    if sign is not None and n.sign != sign:
        raise PatternNotFound(f"curl at {x!r} has sign {n.sign}, expected {sign}")
    kink = Kink(d.arcs[a_in], side, n.sign, -1)
    w = _Work(d)
    if a_in != a_out:
        _contract(w, [x], prefer=(a_in,))
        return w.build(), a_in, kink
    # a figure-eight: the remaining strand becomes a free loop
    big = a_in
    w.reroute({loop})
    idx = next(i for i, c in enumerate(d.components()) if x in c.nodes)
    outer_key = d.component_outer_key(idx)
    if outer_key == ("f", d.local_face_of((big, 0))):
        orientation = "cw"
    elif outer_key == ("f", d.local_face_of((big, 1))):
        orientation = "ccw"
    else:
        raise PatternNotFound("the outer face is the curl's own face")
    face = None
    nesting = w.data.get("nesting", [])
    for ent in list(nesting):
        if ent["outer"].get("arc") == big:
            face = ent.get("face")
            nesting.remove(ent)
    for ref, _ in w.refs():
        if ref.get("arc") == big:
            s = ref["side"]
            ref.clear()
            ref.update({"loop": big, "side": s})
    w.drop(arcs=[big, loop], nodes=[x])
    w.loops[big] = {"id": big, "edge": d.arcs[big], "orientation": orientation, "face": face}
    return w.build(), big, kink


# ----------------------------------------------------------------------- R2
def _r2_insert(d: Diagram, a, a_side, b, b_side, over):
    for arc in (a, b):
        if arc not in d.arcs:
            raise PatternNotFound(f"no arc {arc!r}")
    if a == b:
        raise PatternNotFound("a finger move needs two different arcs")
    if d.local_face_of((a, _end(a_side))) != d.local_face_of((b, _end(b_side))):
        raise PatternNotFound(f"arcs {a!r} and {b!r} do not share that face")
    if over not in ("a", "b"):
        raise MalformedInput("'over' must be 'a' or 'b'")
    w = _Work(d)
    ea, eb = d.arcs[a], d.arcs[b]
    a2, a3 = w.new_arc(ea), w.new_arc(ea)
    b2, b3 = w.new_arc(eb), w.new_arc(eb)
    w.set_slot(d.head[a], a3)
    w.set_slot(d.head[b], b3)
    parallel = a_side != b_side
    f = 0 if a_side == "right" else 180
    bdir = 90 if parallel else 270
    b_at = {"X1": (b, b2), "X2": (b2, b3)} if parallel else {"X1": (b2, b3), "X2": (b, b2)}
    over_idx = 0 if over == "a" else 1
    slots1, sw1 = _cross((a, a2, f), (*b_at["X1"], bdir))
    slots2, sw2 = _cross((a2, a3, f + 180), (*b_at["X2"], bdir))
    x1 = w.new_crossing(_sign(over_idx, sw1), slots1)
    x2 = w.new_crossing(_sign(over_idx, sw2), slots2)
    return w.build(), [x1, x2]


def _bigon(d: Diagram, x1, x2):
    """Arcs (u, v) bounding a two-sided face between crossings x1 and x2 with a consistent over-strand."""
    ends = {x1, x2}
    if x1 == x2 or not all(isinstance(d.nodes.get(x), Crossing) for x in ends):
        raise PatternNotFound("R2 removal needs two distinct crossings")
    for orbit in d.face_orbits():
        if len(orbit) != 2 or orbit[0][0] == orbit[1][0]:
            continue
        u, v = orbit[0][0], orbit[1][0]
        if {d.tail[u][0], d.head[u][0]} != ends or {d.tail[v][0], d.head[v][0]} != ends:
            continue
        tail, head = d.nodes[d.tail[u][0]], d.nodes[d.head[u][0]]
        if (tail.over_out == u) == (head.over_in == u):
            return u, v
    raise PatternNotFound(f"no removable bigon between {x1!r} and {x2!r}")


def _r2_remove(d: Diagram, x1, x2):
    _bigon(d, x1, x2)
    w = _Work(d)
    _contract(w, [x1, x2])
    return w.build()


# ----------------------------------------------------------------------- R3
def _triangle(d: Diagram, sides):
    sides = set(sides)
    if len(sides) != 3:
        raise PatternNotFound("R3 needs three distinct side arcs")
    for orbit in d.face_orbits():
        if len(orbit) == 3 and {a for a, _ in orbit} == sides:
            break
    else:
        raise PatternNotFound("the arcs do not bound a triangular face")
    ends = set()
    for a in sides:
        t, h = d.tail[a][0], d.head[a][0]
        if t == h or not isinstance(d.nodes[t], Crossing) or not isinstance(d.nodes[h], Crossing):
            raise PatternNotFound("triangle corners must be three distinct crossings")
        ends |= {t, h}
    if len(ends) != 3:
        raise PatternNotFound("triangle corners must be three distinct crossings")
    return sorted(sides, key=lambda a: list(d.arcs).index(a))


def _r3_plan(d: Diagram, sides):
    sides = _triangle(d, sides)
    overs = []
    assign = []
    for m in sides:
        x, ox = d.tail[m]
        y, iy = d.head[m]
        nx, ny = d.nodes[x], d.nodes[y]
        ix, oy = OPPOSITE[ox], OPPOSITE[iy]
        p, q = getattr(nx, ix), getattr(ny, oy)
        overs.append((nx.over_out == m) + (ny.over_in == m))
        assign += [((y, iy), p), ((y, oy), m), ((x, ix), m), ((x, ox), q)]
    if sorted(overs) != [0, 1, 2]:
        raise PatternNotFound("the three strands are not stacked top/middle/bottom")
    return sides, assign


def _r3(d: Diagram, sides):
    sides, assign = _r3_plan(d, sides)
    w = _Work(d)
    w.reroute(set(sides))
    for where, arc in assign:
        w.set_slot(where, arc)
    return w.build()


# ----------------------------------------------------------------------- R4
_EAST = {"edge_in": "se", "edge_out": "nw", "b_in": "sw", "b_out": "ne"}
_WEST = {"edge_in": "sw", "edge_out": "ne", "b_in": "se", "b_out": "nw"}


def _r4_pattern(d: Diagram, v, src: str):
    """Strand crossing every edge on side ``src`` of vertex ``v`` right next to it."""
    node = d.nodes.get(v)
    if not isinstance(node, Vertex):
        raise PatternNotFound(f"{v!r} is not a vertex")
    near = list(node.outs if src == "out" else node.ins)
    ys, geo = [], None
    for a in near:
        y, slot = d.head[a] if src == "out" else d.tail[a]
        if not isinstance(d.nodes[y], Crossing):
            raise PatternNotFound(f"edge {a!r} does not meet a crossing next to {v!r}")
        key = "edge_in" if src == "out" else "edge_out"
        g = _EAST if slot == _EAST[key] else _WEST if slot == _WEST[key] else None
        if g is None or (geo is not None and g is not geo):
            raise OrientationIncompatible(f"strand near {v!r} does not cross its edges transversally in one direction")
        geo = g
        ys.append(y)
    if len(set(ys)) != len(ys):
        raise PatternNotFound("one crossing meets two edges of the vertex")
    far_key = "edge_out" if src == "out" else "edge_in"
    fars = [getattr(d.nodes[y], geo[far_key]) for y in ys]
    order = ys if geo is _EAST else ys[::-1]
    for y1, y2 in zip(order, order[1:]):
        if getattr(d.nodes[y1], geo["b_out"]) != getattr(d.nodes[y2], geo["b_in"]):
            raise PatternNotFound(f"crossings next to {v!r} are not consecutive along one strand")
    mids = [getattr(d.nodes[y], geo["b_out"]) for y in order[:-1]]
    b_pre = getattr(d.nodes[order[0]], geo["b_in"])
    b_post = getattr(d.nodes[order[-1]], geo["b_out"])
    overs = {d.nodes[y].over_in == getattr(d.nodes[y], geo["b_in"]) for y in ys}
    if len(overs) != 1:
        raise PatternNotFound("the strand is not uniformly over or under")
    for i in range(len(near) - 1):
        h = (near[i + 1], 0) if src == "out" else (near[i], 1)
        if len(d.face_orbits()[d.local_face_of(h)]) != 3:
            raise PatternNotFound("a sector between the strand and the vertex is not a triangle")
    strand = {b_pre, b_post, *mids}
    if strand & (set(node.ins) | set(node.outs) | set(fars)):
        raise PatternNotFound("the sliding strand runs into the vertex itself")
    return {"near": near, "fars": fars, "ys": ys, "mids": mids, "pre": b_pre, "post": b_post,
            "geo": geo, "over": overs.pop()}


def _r4(d: Diagram, v, src: str, over: bool):
    if src not in ("out", "in"):
        raise MalformedInput("R4 anchor 'from' must be 'out' or 'in'")
    pat = _r4_pattern(d, v, src)
    if pat["over"] != over:
        raise PatternNotFound("over/under data does not match the move kind")
    geo = pat["geo"]
    w = _Work(d)
    w.reroute(set(pat["near"]) | set(pat["mids"]))
    w.drop(arcs=pat["near"] + pat["mids"], nodes=pat["ys"])
    node = w.nodes[v]
    node["out" if src == "out" else "in"] = list(pat["fars"])
    dst = "in" if src == "out" else "out"
    others = list(node[dst])
    k = len(others)
    order = list(range(k)) if geo is _EAST else list(range(k))[::-1]
    b_arcs = [pat["pre"]] + [w.new_arc(w.arcs[pat["pre"]]) for _ in range(k - 1)] + [pat["post"]]
    east = geo is _EAST
    sign = ("pos" if east else "neg") if over else ("neg" if east else "pos")
    for step, i in enumerate(order):
        far = others[i]
        new = w.new_arc(w.arcs[far])
        if dst == "in":
            edge_in, edge_out = far, new
        else:
            edge_in, edge_out = new, far
        node[dst][i] = new
        w.new_crossing(sign, {geo["edge_in"]: edge_in, geo["edge_out"]: edge_out,
                              geo["b_in"]: b_arcs[step], geo["b_out"]: b_arcs[step + 1]})
    return w.build()


# ----------------------------------------------------------------------- R5
def _r5_insert(d: Diagram, v, side, index, sign):
    node = d.nodes.get(v)
    if not isinstance(node, Vertex):
        raise PatternNotFound(f"{v!r} is not a vertex")
    lst = list(node.ins if side == "in" else node.outs)
    if side not in ("in", "out") or not 0 <= index < len(lst) - 1:
        raise OrientationIncompatible(f"vertex {v!r} has no adjacent {side}-edge pair at {index}")
    x, y = lst[index], lst[index + 1]
    w = _Work(d)
    x2, y2 = w.new_arc(d.arcs[x]), w.new_arc(d.arcs[y])
    vn = w.nodes[v]
    if side == "in":
        slots = {"sw": x, "se": y, "ne": x2, "nw": y2}
        vn["in"][index], vn["in"][index + 1] = y2, x2
    else:
        slots = {"sw": y2, "se": x2, "ne": y, "nw": x}
        vn["out"][index], vn["out"][index + 1] = y2, x2
    c = w.new_crossing(sign, slots)
    return w.build(), c


def _r5_pattern(d: Diagram, c, side=None):
    n = d.nodes.get(c)
    if not isinstance(n, Crossing):
        raise PatternNotFound(f"{c!r} is not a crossing")
    found = []
    hn, hw = d.head[n.ne], d.head[n.nw]
    if hn[0] == hw[0] and isinstance(d.nodes[hn[0]], Vertex) and hw[1][1] + 1 == hn[1][1]:
        found.append(("in", hn[0], hw[1][1]))
    ts, te = d.tail[n.sw], d.tail[n.se]
    if ts[0] == te[0] and isinstance(d.nodes[ts[0]], Vertex) and ts[1][1] + 1 == te[1][1]:
        found.append(("out", ts[0], ts[1][1]))
    if side is not None:
        found = [f for f in found if f[0] == side]
    if not found:
        raise PatternNotFound(f"crossing {c!r} is not a twist next to a vertex")
    return found[0]


def _r5_remove(d: Diagram, c, side, sign):
    side, v, index = _r5_pattern(d, c, side)
    n = d.nodes[c]
    if n.sign != sign:
        raise PatternNotFound(f"twist at {c!r} has the other handedness")
    w = _Work(d)
    vn = w.nodes[v]
    if side == "in":
        gone = [n.ne, n.nw]
        vn["in"][index], vn["in"][index + 1] = n.sw, n.se
    else:
        gone = [n.sw, n.se]
        vn["out"][index], vn["out"][index + 1] = n.nw, n.ne
    w.reroute(gone)
    w.drop(arcs=gone, nodes=[c])
    return w.build(), (side, v, index)


# -------------------------------------------------------------------- apply
def apply_detailed(d: Diagram, site: MoveSite) -> MoveResult:
    """Apply a move and return the new diagram, the inverse site and any curls touched."""
    fam, anc, ins = site.family, site.anchor, site.direction == "insert"
    back = "remove" if ins else "insert"
    if fam == "R1":
        sign = "pos" if site.kind == "R1+" else "neg"
        if ins:
            target, side = _need(anc, "arc", "side")
            new, x, kink = _kink_insert(d, target, side, sign)
            return MoveResult(new, MoveSite(site.kind, {"crossing": x, "side": side}, back), (kink,))
        (x,) = _need(anc, "crossing")
        new, arc, kink = _kink_remove(d, x, anc.get("side"), sign)
        return MoveResult(new, MoveSite(site.kind, {"arc": arc, "side": kink.side}, back), (kink,))
    if fam == "R1'":
        if ins:
            target, side = _need(anc, "arc", "side")
            mid, x1, k1 = _kink_insert(d, target, side, "pos")
            new, x2, k2 = _kink_insert(mid, target, side, "neg")
            return MoveResult(new, MoveSite("R1'", {"crossings": [x2, x1], "side": side}, back), (k1, k2))
        (pair,) = _need(anc, "crossings")
        if len(pair) != 2:
            raise MalformedInput("R1' removal needs two crossings")
        side = anc.get("side")
        pats = [_kink_pattern(d, x, side) for x in pair]
        signs = {d.nodes[x].sign for x in pair}
        if signs != {"pos", "neg"} or pats[0][0] != pats[1][0]:
            raise PatternNotFound("R1' needs two curls of opposite sign on the same side")
        if pats[0][3] != pats[1][2]:
            raise PatternNotFound("the two curls are not adjacent along the strand")
        mid, _, k1 = _kink_remove(d, pair[1], pats[1][0])
        new, arc, k2 = _kink_remove(mid, pair[0], pats[0][0])
        return MoveResult(new, MoveSite("R1'", {"arc": arc, "side": pats[0][0]}, back), (k1, k2))
    if fam == "R2":
        if ins:
            a, a_side, b, b_side = _need(anc, "a", "a_side", "b", "b_side")
            new, xs = _r2_insert(d, a, a_side, b, b_side, anc.get("over", "a"))
            return MoveResult(new, MoveSite("R2", {"crossings": xs}, back))
        (xs,) = _need(anc, "crossings")
        x1, x2 = xs
        _bigon(d, x1, x2)
        plan = _contraction_plan(d, [x1, x2])
        new = _r2_remove(d, x1, x2)
        return MoveResult(new, _r2_inverse_site(d, new, plan))
    if fam == "R3":
        (sides,) = _need(anc, "arcs")
        return MoveResult(_r3(d, sides), MoveSite("R3", {"arcs": list(sides)}, back))
    if fam == "R4":
        v, src = _need(anc, "vertex", "from")
        new = _r4(d, v, src, site.kind == "R4over")
        return MoveResult(new, MoveSite(site.kind, {"vertex": v, "from": "in" if src == "out" else "out"}, back))
    if fam == "R5":
        sign = "pos" if site.kind == "R5ccw" else "neg"
        if ins:
            v, side, index = _need(anc, "vertex", "side", "index")
            new, c = _r5_insert(d, v, side, index, sign)
            return MoveResult(new, MoveSite(site.kind, {"crossing": c, "side": side}, back))
        (c,) = _need(anc, "crossing")
        new, (side, v, index) = _r5_remove(d, c, anc.get("side"), sign)
        return MoveResult(new, MoveSite(site.kind, {"vertex": v, "side": side, "index": index}, back))
    raise MalformedInput(f"unsupported move {site.kind}")


def _r2_inverse_site(old: Diagram, new: Diagram, plan):
    """Recreate the finger move that an R2 removal undid (None if both strands merged into one arc)."""
    if len(plan) != 2:
        return None
    a, b = plan[0][0], plan[1][0]
    for over in ("a", "b"):
        for a_side in ("left", "right"):
            for b_side in ("left", "right"):
                if new.local_face_of((a, _end(a_side))) != new.local_face_of((b, _end(b_side))):
                    continue
                trial = MoveSite("R2", {"a": a, "a_side": a_side, "b": b, "b_side": b_side, "over": over})
                if isomorphic(apply_detailed(new, trial).diagram, old):
                    return trial
    return None


def apply(d: Diagram, site: MoveSite) -> Diagram:
    return apply_detailed(d, site).diagram


def apply_with_inverse(d: Diagram, site: MoveSite) -> tuple[Diagram, MoveSite]:
    res = apply_detailed(d, site)
    return res.diagram, res.inverse


def replay(d: Diagram, script) -> list[Diagram]:
    """Apply a move script (MoveSite records or their dicts) and return every diagram."""
    out = [d]
    for rec in script:
        site = rec if isinstance(rec, MoveSite) else MoveSite.from_dict(rec)
        out.append(apply(out[-1], site))
    return out


# -------------------------------------------------------------- isomorphism
def _component_code(d: Diagram, comp, outer_key, start):
    node_label, arc_label = {start: 0}, {}
    order, queue = [start], [start]
    codes = []
    while queue:
        nid = queue.pop(0)
        n = d.nodes[nid]
        if isinstance(n, Vertex):
            slots = [(a, 1) for a in n.ins] + [(a, 0) for a in n.outs]
            head = ("v", len(n.ins), len(n.outs))
        else:
            slots = [(n.sw, 1), (n.se, 1), (n.ne, 0), (n.nw, 0)]
            head = ("c", n.sign)
        labels = []
        for a, end in slots:
            if a not in arc_label:
                arc_label[a] = len(arc_label)
            labels.append(arc_label[a])
            other = d.tail[a][0] if end == 1 else d.head[a][0]
            if other not in node_label:
                node_label[other] = len(node_label)
                order.append(other)
                queue.append(other)
        codes.append((*head, tuple(labels)))
    edges = tuple(repr(d.arcs[a]) for a in sorted(arc_label, key=arc_label.get))
    outer = ()
    if outer_key is not None and outer_key[0] == "f":
        outer = tuple(sorted((arc_label[a], e) for a, e in d.face_orbits()[outer_key[1]]))
    return (tuple(codes), edges, outer)


def canonical_form(d: Diagram):
    """A label-free code of the map; equal codes mean isomorphic diagrams with the same edges."""
    parts = []
    for idx, comp in enumerate(d.components()):
        if comp.loops:
            fl = d.free_loops[comp.loops[0]]
            parts.append(("loop", repr(fl.edge), fl.orientation))
            continue
        key = d.component_outer_key(idx)
        parts.append(("map", min(_component_code(d, comp, key, s) for s in comp.nodes)))
    return tuple(sorted(parts, key=repr))


def isomorphic(d1: Diagram, d2: Diagram) -> bool:
    return canonical_form(d1) == canonical_form(d2)


# --------------------------------------------------------------- candidates
def _kink_crossings(d: Diagram):
    out = []
    for c in d.crossings:
        try:
            out.append((c.id, _kink_pattern(d, c.id)))
        except PatternNotFound:
            pass
    return out


def candidate_sites(d: Diagram, framed: bool) -> dict:
    """Applicable sites grouped as {"insert"|"neutral"|"remove": {family: [MoveSite, ...]}}."""
    ins, neu, rem = {}, {}, {}
    strands = list(d.arcs) + list(d.free_loops)
    sides = ("left", "right")
    if framed:
        ins["R1'"] = [MoveSite("R1'", {"arc": a, "side": s}) for a in strands for s in sides]
    else:
        ins["R1"] = [MoveSite(k, {"arc": a, "side": s}) for a in strands for s in sides for k in ("R1+", "R1-")]
    r2 = []
    for orbit in d.face_orbits():
        hs = [(a, "left" if e == 0 else "right") for a, e in orbit]
        for i, (a, sa) in enumerate(hs):
            for b, sb in hs[i + 1:]:
                if a != b:
                    for over in ("a", "b"):
                        r2.append(MoveSite("R2", {"a": a, "a_side": sa, "b": b, "b_side": sb, "over": over}))
    ins["R2"] = r2
    if not framed:
        ins["R5"] = [MoveSite(k, {"vertex": v.id, "side": side, "index": i})
                     for v in d.vertices for side, lst in (("in", v.ins), ("out", v.outs))
                     for i in range(len(lst) - 1) for k in ("R5cw", "R5ccw")]
    # neutral moves
    r3 = []
    for orbit in d.face_orbits():
        if len(orbit) == 3:
            sides3 = [a for a, _ in orbit]
            try:
                _r3_plan(d, sides3)
            except PatternNotFound:
                continue
            r3.append(MoveSite("R3", {"arcs": sides3}))
    neu["R3"] = r3
    r4 = []
    for v in d.vertices:
        for src in ("out", "in"):
            try:
                pat = _r4_pattern(d, v.id, src)
            except (PatternNotFound, OrientationIncompatible):
                continue
            r4.append(MoveSite("R4over" if pat["over"] else "R4under", {"vertex": v.id, "from": src},
                               "insert" if src == "out" else "remove"))
    neu["R4"] = r4
    # removals
    kinks = _kink_crossings(d)
    if framed:
        pairs = []
        for x, (side, _, _, a_out) in kinks:
            for y, (side2, _, a_in2, _) in kinks:
                if x != y and side == side2 and a_out == a_in2 and d.nodes[x].sign != d.nodes[y].sign:
                    pairs.append(MoveSite("R1'", {"crossings": [x, y], "side": side}, "remove"))
        rem["R1'"] = pairs
    else:
        rem["R1"] = [MoveSite("R1+" if d.nodes[x].sign == "pos" else "R1-", {"crossing": x, "side": p[0]}, "remove")
                     for x, p in kinks]
    bigons = []
    for orbit in d.face_orbits():
        if len(orbit) == 2 and orbit[0][0] != orbit[1][0]:
            u = orbit[0][0]
            ends = [d.tail[u][0], d.head[u][0]]
            if ends[0] != ends[1] and all(isinstance(d.nodes[x], Crossing) for x in ends):
                try:
                    _bigon(d, *ends)
                except PatternNotFound:
                    continue
                bigons.append(MoveSite("R2", {"crossings": ends}, "remove"))
    rem["R2"] = bigons
    if not framed:
        twists = []
        for c in d.crossings:
            try:
                side, _, _ = _r5_pattern(d, c.id)
            except PatternNotFound:
                continue
            twists.append(MoveSite("R5ccw" if c.sign == "pos" else "R5cw", {"crossing": c.id, "side": side}, "remove"))
        rem["R5"] = twists
    return {"insert": ins, "neutral": neu, "remove": rem}


_ADDS = {"R1": 1, "R1'": 2, "R2": 2, "R5": 1}


def _r4_growth(d: Diagram, site: MoveSite) -> int:
    v = d.nodes[site.anchor["vertex"]]
    src, dst = (v.outs, v.ins) if site.anchor["from"] == "out" else (v.ins, v.outs)
    return len(dst) - len(src)


# --------------------------------------------------------------------- fuzz
@dataclass
class FuzzRun:
    seed: Any
    framed: bool
    diagrams: list
    sites: list
    kinks: list

    @property
    def script(self) -> list:
        return [s.to_dict() for s in self.sites]

    def __iter__(self):
        return iter(self.diagrams)

    def __len__(self):
        return len(self.diagrams)


def fuzz(d: Diagram, seed, n_moves: int, framed: bool = True, max_crossings: int = 12,
         weights=(0.5, 0.3, 0.2)) -> FuzzRun:
    """Seeded insert-biased random walk of moves; returns every intermediate diagram."""
    if n_moves < 1:
        raise MalformedInput("n_moves must be at least 1")
    rng = random.Random(seed)
    run = FuzzRun(seed, framed, [d], [], [])
    for _ in range(n_moves):
        cur = run.diagrams[-1]
        groups = candidate_sites(cur, framed)
        room = max_crossings - len(cur.crossings)
        groups["insert"] = {f: s for f, s in groups["insert"].items() if _ADDS[f] <= room}
        groups["neutral"]["R4"] = [s for s in groups["neutral"]["R4"] if _r4_growth(cur, s) <= room]
        result = None
        for _attempt in range(64):
            live = [(g, w) for g, w in zip(("insert", "neutral", "remove"), weights)
                    if any(groups[g].values())]
            if not live:
                break
            g = rng.choices([x for x, _ in live], [w for _, w in live])[0]
            fams = sorted(f for f, s in groups[g].items() if s)
            fam = rng.choice(fams)
            site = rng.choice(groups[g][fam])
            try:
                result = apply_detailed(cur, site)
                break
            except (PatternNotFound, OrientationIncompatible):
                groups[g][fam].remove(site)
        if result is None:
            break
        run.diagrams.append(result.diagram)
        run.sites.append(site)
        run.kinks.append(result.kinks)
    return run


# ------------------------------------------------------------- verification
def kink_factors(kinks, mer) -> tuple[HalfMonomial, HalfMonomial]:
    """Predicted (Rot, <D>) multipliers for a list of curls created or destroyed."""
    rank = next(iter(mer.values())).rank
    r = b = HalfMonomial.identity(rank)
    for k in kinks:
        t = mer[k.edge]
        step_r = t if k.side == "left" else t.inv()
        if (k.side, k.sign) == ("left", "pos"):
            step_b = t.inv()
        elif (k.side, k.sign) == ("right", "neg"):
            step_b = t
        else:
            step_b = HalfMonomial.identity(rank)
        r = r * step_r ** k.change
        b = b * step_b ** k.change
    return r, b


def bracket(d: Diagram, mer):
    """<D> with the base point on the default arc."""
    return state_sum(decorate(d, d.default_base()), mer)


@dataclass(frozen=True)
class StepCheck:
    index: int
    site: MoveSite
    rot_ok: bool
    bracket_ok: bool
    delta_ok: bool | None

    @property
    def ok(self) -> bool:
        return self.rot_ok and self.bracket_ok and self.delta_ok is not False


def verify_run(run: FuzzRun, lat=None) -> list[StepCheck]:
    """Compare Rot, <D> and (framed runs) Delta against the predicted change at every step."""
    d0 = run.diagrams[0]
    mer = meridian_map(d0, lat if lat is not None else diagram_lattice(d0))
    rots = [rot(d, mer) for d in run.diagrams]
    brs = [bracket(d, mer) for d in run.diagrams]
    delta0 = normalize(rots[0], brs[0])
    out = []
    for i, site in enumerate(run.sites):
        fr, fb = kink_factors(run.kinks[i], mer)
        rot_ok = rots[i + 1] == rots[i] * fr
        br_ok = fraction_eq(brs[i + 1], brs[i] * fb)
        delta_ok = fraction_eq(normalize(rots[i + 1], brs[i + 1]), delta0) if run.framed else None
        out.append(StepCheck(i + 1, site, rot_ok, br_ok, delta_ok))
    return out


def check_run(run: FuzzRun, lat=None) -> list[StepCheck]:
    steps = verify_run(run, lat)
    bad = [s for s in steps if not s.ok]
    if bad:
        raise InvarianceViolation(f"step {bad[0].index} ({bad[0].site.kind}) broke the predicted behaviour",
                                  run.script[: bad[0].index])
    return steps


# ------------------------------------------------------- local Rot relations
def _graph(vertices, outer):
    """Closed plane graph from (id, ins, outs) triples; every arc is its own edge."""
    names = sorted({a for _, ins, outs in vertices for a in ins + outs})
    return Diagram.from_dict({
        "edges": [{"id": a} for a in names],
        "arcs": [{"id": a, "edge": a} for a in names],
        "nodes": [{"id": v, "type": "vertex", "in": list(ins), "out": list(outs)} for v, ins, outs in vertices],
        "free_loops": [], "outer": {"arc": outer[0], "side": outer[1]}, "nesting": [],
    })


def _rot_exponents(d: Diagram, basis) -> dict:
    lat = diagram_lattice(d, basis)
    r = rot(d, lat)
    return {name: Fraction(h, 2) for name, h in zip(lat.basis_names, r.halves) if h}


# Two strands a, c entering at the bottom and a2, c2 leaving at the top,
# closed by a vertex below whose incoming edges wrap around the outside.
_CLOSE = ("W", ["a2", "c2"], ["a", "c"])
_QUAD = [_CLOSE, ("V", ["a", "c"], ["a2", "c2"])]
_THETA = [("v1", ["b"], ["a", "c"]), ("v2", ["a", "c"], ["b"])]
_TRIPOD = [("v1", ["b"], ["a", "c", "d"]), ("v2", ["a", "c", "d"], ["b"])]


def _prop1_cases(item: str):
    """(graph, graph, basis, expected exponent shift of the first over the second)."""
    quad = (_QUAD, ("a2", "left"))
    theta = (_THETA, ("a", "left"))
    tripod = (_TRIPOD, ("a", "left"))
    split = ([_CLOSE, ("V1", ["a", "c"], ["e"]), ("V2", ["e"], ["a2", "c2"])], ("a2", "left"))
    if item == "i":
        return [(split, quad, ["a", "c", "a2"], {})]
    if item == "ii":
        grouped = [("v1", ["b"], ["a", "u"]), ("u", ["u"], ["c", "d"]), ("v2", ["a", "c", "d"], ["b"])]
        return [((grouped, ("a", "left")), tripod, ["a", "c", "d"], {})]
    if item == "iii":
        grouped = [("v1", ["b"], ["a", "c", "d"]), ("w", ["c", "d"], ["w"]), ("v2", ["a", "w"], ["b"])]
        return [((grouped, ("a", "left")), tripod, ["a", "c", "d"], {})]
    if item == "iv":
        cases = []
        for ins, outs, shift in ((["b", "s"], ["b2", "s"], {"s": -1}), (["s", "b"], ["s", "b2"], {"s": 1})):
            kinked = [("v1", ["b2"], ["a", "c"]), ("v2", ["a", "c"], ["b"]),
                      ("A", ins, ["m"]), ("B", ["m"], outs)]
            cases.append(((kinked, ("a", "left")), theta, ["a", "c", "s"], shift))
        return cases
    if item == "v":
        bigon = [("v1", ["b2"], ["a", "c"]), ("v2", ["a", "c"], ["b"]),
                 ("A", ["b"], ["l", "r"]), ("B", ["l", "r"], ["b2"])]
        return [((bigon, ("a", "left")), theta, ["a", "c", "l"], {})]
    if item == "vi":
        parallel = ([("W", ["a", "c"], ["a", "c"])], ("a", "left"))
        return [(split, parallel, ["a", "c", "a2"], {})]
    if item == "vii":
        rung_right = ([_CLOSE, ("P", ["a"], ["a2", "r"]), ("Q", ["r", "c"], ["c2"])], ("a2", "left"))
        rung_left = ([_CLOSE, ("P", ["a", "r"], ["a2"]), ("Q", ["c"], ["r", "c2"])], ("a2", "left"))
        return [(rung_right, rung_left, ["a", "c", "a2"], {}), (rung_left, quad, ["a", "c", "a2"], {})]
    raise ValueError(f"unknown item {item!r}; expected one of i..vii")


PROP1_ITEMS = ("i", "ii", "iii", "iv", "v", "vi", "vii")


def verify_prop1(item: str) -> bool:
    """Compare Rot of two closed graphs that differ by one local pattern.

    Exponents are compared by edge name, so a graph whose homology is a
    subgroup of the other's is read through the inclusion. In the
    parallel-strand closure of item vi the loop ``a`` stands for both
    ``a`` and ``a2``.
    """
    ok = True
    for (left, left_outer), (right, right_outer), basis, shift in _prop1_cases(item):
        lhs = _rot_exponents(_graph(left, left_outer), basis)
        present = {a for _, ins, _ in right for a in ins}
        rhs = _rot_exponents(_graph(right, right_outer), [b for b in basis if b in present])
        for name, x in shift.items():
            rhs[name] = rhs.get(name, 0) + x
        ok &= lhs == {k: v for k, v in rhs.items() if v}
    return ok
