"""Kauffman states, the multi-variable state sum and its determinant oracle."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

from .diagram import Crossing, DecoratedDiagram, Diagram, decorate, rebuild_edges
from .errors import BasePointOnSite, MarkedRegionsCoincide, SweepMismatch
from .lattice import HalfMonomial
from .ring import LaurentPoly, RingFraction, exact_div, fraction_eq, symmetric_binomial
from .rotation import meridian_map, winding_numbers


@dataclass(frozen=True)
class KauffmanState:
    assignment: tuple  # ((site id, corner label), ...) in crossing order

    def as_dict(self) -> dict:
        return dict(self.assignment)


@dataclass(frozen=True)
class Corner:
    label: str
    region: str
    sign: int
    weight: LaurentPoly


@dataclass(frozen=True)
class WeightTables:
    """Per site: the tuple of its corners with M sign and A weight."""

    corners: dict
    nvars: int


def _mono(m: HalfMonomial) -> LaurentPoly:
    return LaurentPoly.monomial(m)


def weight_tables(dd: DecoratedDiagram, lat=None) -> WeightTables:
    mer = meridian_map(dd.diagram, lat)
    nvars = next(iter(mer.values())).rank
    one = LaurentPoly.one(nvars)
    table = {}
    for site in dd.crossings:
        t = mer[site.edge]
        corners = dict(site.corners)
        if site.kind == "pos":
            w = {"N": (-1, _mono(t.inv())), "W": (1, _mono(t.inv())), "S": (1, one), "E": (1, one)}
        elif site.kind == "neg":
            w = {"N": (-1, _mono(t)), "E": (1, _mono(t)), "S": (1, one), "W": (1, one)}
        else:
            half = t.sqrt()
            w = {"W": (1, _mono(half.inv())), "E": (1, _mono(half)),
                 "N": (1, _mono(half.inv()) - _mono(half))}
        table[site.id] = tuple(Corner(lab, corners[lab], *w[lab]) for lab in ("N", "E", "S", "W") if lab in corners)
    return WeightTables(table, nvars)


def _targets(dd: DecoratedDiagram):
    index = {r: i for i, r in enumerate(dd.unmarked)}
    return index


def _search_order(dd, tables, index):
    """Crossings sorted by ascending number of usable corners (stable)."""
    usable = []
    for site in dd.crossings:
        cs = [(c, index[c.region]) for c in tables.corners[site.id] if c.region in index]
        usable.append((site.id, cs))
    return sorted(usable, key=lambda item: len(item[1]))


def enumerate_states(dd: DecoratedDiagram, lat=None):
    """All Kauffman states, by backtracking over crossings with a bitmask of used regions."""
    d = dd.diagram
    if not d.is_connected():
        return []
    tables = weight_tables(dd, lat)
    index = _targets(dd)
    if len(index) != len(dd.crossings):
        return []
    order = _search_order(dd, tables, index)
    out = []
    chosen = []

    def rec(k, used):
        if k == len(order):
            out.append(KauffmanState(tuple(chosen)))
            return
        sid, cs = order[k]
        for c, bit in cs:
            if not used >> bit & 1:
                chosen.append((sid, c.label))
                rec(k + 1, used | (1 << bit))
                chosen.pop()

    rec(0, 0)
    pos = {s.id: i for i, s in enumerate(dd.crossings)}
    return [KauffmanState(tuple(sorted(s.assignment, key=lambda x: pos[x[0]]))) for s in out]


def state_weight(state: KauffmanState, tables: WeightTables) -> tuple[int, LaurentPoly]:
    sign, poly = 1, LaurentPoly.one(tables.nvars)
    for sid, label in state.assignment:
        c = next(c for c in tables.corners[sid] if c.label == label)
        sign *= c.sign
        poly = poly * c.weight
    return sign, poly


def delta_norm(dd: DecoratedDiagram, lat=None) -> LaurentPoly:
    """|delta| = x - x*t, x the winding on the right of the base arc (the left one is x*t)."""
    d = dd.diagram
    mer = meridian_map(d, lat)
    left, right = dd.marked
    if left == right:
        raise MarkedRegionsCoincide(f"base arc {dd.base!r} has the same region on both sides")
    comp = _component_of(d, dd.base)
    w = winding_numbers(d, mer, comp)
    x = w[right]
    t = mer[d.edge_of(dd.base)]
    return _mono(x) - _mono(x * t)


def _component_of(d: Diagram, arc):
    for i, c in enumerate(d.components()):
        if arc in c.arcs or arc in c.loops:
            return i
    raise KeyError(arc)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPATIAL_ALEX_THREADS", "1")))
    except ValueError:
        return 1


def state_numerator(dd: DecoratedDiagram, lat=None) -> LaurentPoly:
    """Sum of M(s)A(s) over all states, accumulated over subsets of used regions."""
    tables = weight_tables(dd, lat)
    zero = LaurentPoly.zero(tables.nvars)
    d = dd.diagram
    index = _targets(dd)
    if not d.is_connected() or len(index) != len(dd.crossings):
        return zero
    order = _search_order(dd, tables, index)
    if not order:
        return LaurentPoly.one(tables.nvars)

    def run(start_layer):
        layer = start_layer
        for sid, cs in order[1:]:
            nxt: dict = {}
            for used, poly in layer.items():
                for c, bit in cs:
                    if not used >> bit & 1:
                        key = used | (1 << bit)
                        term = poly * c.weight
                        if c.sign < 0:
                            term = -term
                        prev = nxt.get(key)
                        nxt[key] = term if prev is None else prev + term
            layer = {k: v for k, v in nxt.items() if v}
        return sum(layer.values(), zero)

    first = order[0][1]
    seeds = [{1 << bit: (c.weight if c.sign > 0 else -c.weight)} for c, bit in first]
    workers = min(_threads(), len(seeds))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, seeds))
    else:
        parts = [run(s) for s in seeds]
    return sum(parts, zero)


def state_sum(dd: DecoratedDiagram, lat=None) -> RingFraction:
    """<D>_delta = |delta|^-1 * sum over states of M(s)A(s)."""
    num = state_numerator(dd, lat)
    den = delta_norm(dd, lat)
    if num.is_zero():
        return RingFraction(num)
    return RingFraction(num, den)


def state_sum_by_enumeration(dd: DecoratedDiagram, lat=None) -> RingFraction:
    tables = weight_tables(dd, lat)
    total = LaurentPoly.zero(tables.nvars)
    for s in enumerate_states(dd, lat):
        sign, poly = state_weight(s, tables)
        total = total + (poly if sign > 0 else -poly)
    if total.is_zero():
        return RingFraction(total)
    return RingFraction(total, delta_norm(dd, lat))


# ---------------------------------------------------------------- determinant
def _site_rotations(dd: DecoratedDiagram) -> dict:
    """Counterclockwise corner order around every site and every region.

    Sites and regions form a planar bipartite graph whose edges are the
    corners; this returns node -> list of corners ``(site id, label)``.
    """
    d = dd.diagram
    rot: dict = {}
    for site in dd.crossings:
        labels = ("E", "N", "W", "S") if site.kind != "circle" else ("E", "N", "W")
        rot[("x", site.id)] = [(site.id, lab) for lab in labels]
    slot_label = ("S", "E", "N", "W")
    for i, orbit in enumerate(d.face_orbits()):
        region = d.local_region(("f", i))
        seq = rot.setdefault(("r", region), [])
        for h in orbit:
            far = (h[0], 1 - h[1])
            nid = d.head[h[0]][0] if h[1] == 0 else d.tail[h[0]][0]
            ring = d.rotation[nid]
            k = ring.index(far)
            nxt = ring[(k - 1) % len(ring)]
            node = d.nodes[nid]
            if isinstance(node, Crossing):
                seq.append((nid, slot_label[(k - 1) % 4]))
                continue
            if far[1] == 1:
                seq.append((f"{nid}:{far[0]}", "W"))
            if nxt[1] == 1:
                seq.append((f"{nid}:{nxt[0]}", "E"))
    for v in d.vertices:
        rot[("r", f"o:{v.id}")] = [(f"{v.id}:{a}", "N") for a in v.ins]
    return rot


def kasteleyn_signs(dd: DecoratedDiagram) -> dict:
    """Signs on corners making every perfect matching of the site/region graph
    (marked regions removed) contribute to the determinant with the same sign.

    Tree edges of a spanning forest get +1; the remaining edges are fixed face
    by face, peeling leaves of the dual tree, so that each face of length 2k
    other than one root face per component has sign product (-1)^(k+1).
    """
    marked = set(dd.marked)
    site_region = {}
    for site in dd.crossings:
        for lab, reg in site.corners:
            site_region[(site.id, lab)] = reg
    rot = {}
    for node, corners in _site_rotations(dd).items():
        if node[0] == "r" and node[1] in marked:
            continue
        rot[node] = [c for c in corners if site_region[c] not in marked]
    ends = {c: (("x", c[0]), ("r", site_region[c])) for c in site_region if site_region[c] not in marked}
    pos = {}
    for node, corners in rot.items():
        for i, c in enumerate(corners):
            pos[(c, node)] = i
    # darts are (corner, node it leaves from)
    face_of, faces = {}, []
    for c, (x, r) in ends.items():
        for start in ((c, x), (c, r)):
            if start in face_of:
                continue
            walk, dart = [], start
            while dart not in face_of:
                face_of[dart] = len(faces)
                walk.append(dart[0])
                corner, node = dart
                other = ends[corner][1] if node == ends[corner][0] else ends[corner][0]
                ring = rot[other]
                dart = (ring[(pos[(corner, other)] - 1) % len(ring)], other)
            faces.append(walk)
    # spanning forest
    adj: dict = {n: [] for n in rot}
    for c, (x, r) in ends.items():
        adj[x].append((c, r))
        adj[r].append((c, x))
    sign, comp_of = {}, {}
    for root in rot:
        if root in comp_of:
            continue
        comp_of[root] = root
        stack = [root]
        while stack:
            n = stack.pop()
            for c, m in adj[n]:
                if m not in comp_of:
                    comp_of[m] = root
                    sign[c] = 1
                    stack.append(m)
    face_comp = [comp_of[ends[w[0]][0]] for w in faces]
    roots = {}
    for i, comp in enumerate(face_comp):
        roots.setdefault(comp, i)
    pending = [i for i in range(len(faces)) if i not in roots.values()]
    while pending:
        progress = False
        rest = []
        for i in pending:
            unsigned = {c for c in faces[i] if c not in sign}
            if len(unsigned) == 1:
                (c,) = unsigned
                prod = 1
                for e in faces[i]:
                    if e != c:
                        prod *= sign[e]
                want = 1 if (len(faces[i]) // 2) % 2 == 1 else -1
                sign[c] = prod * want
                progress = True
            elif unsigned:
                rest.append(i)
        if not progress and rest:
            raise RuntimeError("dual tree peeling stalled")
        pending = rest
    for c in ends:
        sign.setdefault(c, 1)
    return sign


def alexander_matrix(dd: DecoratedDiagram, lat=None) -> list[list[LaurentPoly]]:
    """Rows: crossings; columns: unmarked regions; entries: signed A-weights.

    Each corner enters as ``kappa * M * A`` with ``kappa`` a Kasteleyn sign of
    the planar site/region graph, so the determinant expands into the state
    sum up to one global sign.
    """
    tables = weight_tables(dd, lat)
    index = _targets(dd)
    zero = LaurentPoly.zero(tables.nvars)
    kappa = kasteleyn_signs(dd)
    rows = []
    for site in dd.crossings:
        row = [zero] * len(index)
        for c in tables.corners[site.id]:
            if c.region in index:
                j = index[c.region]
                w = c.weight if kappa[(site.id, c.label)] * c.sign > 0 else -c.weight
                row[j] = row[j] + w
        rows.append(row)
    return rows


def _det_cofactor(m, nvars):
    n = len(m)
    memo = {}

    def minor(row, cols):
        if row == n:
            return LaurentPoly.one(nvars)
        key = cols
        if key in memo:
            return memo[key]
        total = LaurentPoly.zero(nvars)
        sign = 1
        for j in range(n):
            if cols >> j & 1:
                continue
            if m[row][j]:
                sub = minor(row + 1, cols | (1 << j))
                term = m[row][j] * sub
                total = total + term if sign > 0 else total - term
            sign = -sign
        memo[key] = total
        return total

    # sign alternates over the remaining free columns
    return minor(0, 0)


def _det_bareiss(m, nvars):
    a = [list(r) for r in m]
    n = len(a)
    sign = 1
    prev = LaurentPoly.one(nvars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly.zero(nvars)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def alexander_det(dd: DecoratedDiagram, lat=None) -> LaurentPoly:
    """det of the crossings x unmarked-regions matrix of summed A-weights."""
    m = alexander_matrix(dd, lat)
    mer = meridian_map(dd.diagram, lat)
    nvars = next(iter(mer.values())).rank
    if not dd.diagram.is_connected() or len(m) != len(dd.unmarked):
        return LaurentPoly.zero(nvars)
    if not m:
        return LaurentPoly.one(nvars)
    if len(m) <= 8:
        return _det_cofactor(m, nvars)
    return _det_bareiss(m, nvars)


def determinant_sign(dd: DecoratedDiagram, lat=None) -> int:
    """+1 or -1 with numerator = sign * det, or 0 if neither holds."""
    num = state_numerator(dd, lat)
    det = alexander_det(dd, lat)
    if num == det:
        return 1
    if num == -det:
        return -1
    return 0


def state_sum_via_det(dd: DecoratedDiagram, lat=None) -> RingFraction:
    """State sum from the determinant and the M*sgn factor of a single state."""
    det = alexander_det(dd, lat)
    if det.is_zero():
        return RingFraction(det)
    tables = weight_tables(dd, lat)
    index = _targets(dd)
    kappa = kasteleyn_signs(dd)
    state = _first_state(dd, tables, index)
    sign = 1
    cols = []
    for site in dd.crossings:
        label = dict(state.assignment)[site.id]
        c = next(c for c in tables.corners[site.id] if c.label == label)
        sign *= kappa[(site.id, label)]
        cols.append(index[c.region])
    sign *= _perm_sign(cols)
    num = det if sign > 0 else -det
    return RingFraction(num, delta_norm(dd, lat))


def _first_state(dd, tables, index):
    order = _search_order(dd, tables, index)
    chosen = []

    def rec(k, used):
        if k == len(order):
            return True
        sid, cs = order[k]
        for c, bit in cs:
            if not used >> bit & 1:
                chosen.append((sid, c.label))
                if rec(k + 1, used | (1 << bit)):
                    return True
                chosen.pop()
        return False

    rec(0, 0)
    return KauffmanState(tuple(chosen))


def _perm_sign(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


# ------------------------------------------------------------------- sweeps
@dataclass(frozen=True)
class SweepReport:
    value: RingFraction
    timings: dict
    skipped: tuple = ()  # arcs with the same region on both sides (trivial meridian)


def base_point_sweep(d: Diagram, lat=None) -> SweepReport:
    """State sum with the base point on every admissible arc; all values must agree."""
    mer = meridian_map(d, lat)
    values, timings, skipped = {}, {}, []
    first = None
    for arc in d.base_candidates():
        if d.left_region(arc) == d.right_region(arc):
            skipped.append(arc)
            continue
        t0 = time.perf_counter()
        v = state_sum(decorate(d, arc), mer)
        timings[arc] = time.perf_counter() - t0
        values[arc] = v
        if first is None:
            first = arc
        elif not fraction_eq(values[first], v):
            raise SweepMismatch(first, arc)
    if first is None:
        raise MarkedRegionsCoincide("no arc separates two regions")
    return SweepReport(values[first], timings, tuple(skipped))


# -------------------------------------------------------------------- skein
def _rewire(data, crossing_id, build):
    nodes = [n for n in data["nodes"] if n["id"] != crossing_id]
    c = next(n for n in data["nodes"] if n["id"] == crossing_id)
    out = dict(data)
    extra_nodes, extra_arcs = build(c)
    out["nodes"] = nodes + extra_nodes
    out["arcs"] = list(data["arcs"]) + extra_arcs
    return rebuild_edges(out)


def _fresh(prefix, used):
    k = 0
    while f"{prefix}{k}" in used:
        k += 1
    return f"{prefix}{k}"


def skein_resolutions(d: Diagram, crossing_id):
    """The two-vertex 'H' and merge-split resolutions of a crossing.

    Returns ((H diagram, its extra meridian), (MS diagram, its extra meridian))
    where extra meridians are given as factors (a, b) meaning mid = t^a * s^b
    for t the sw->ne strand and s the se->nw strand.
    """
    data = d.to_dict()
    used = set(d.arcs) | set(d.nodes) | set(d.edges) | set(d.free_loops)
    mid = _fresh("mid", used)
    p, q = _fresh("P", used), _fresh("Q", used | {_fresh("P", used)})

    def h_build(c):
        return ([{"id": p, "type": "vertex", "in": [c["sw"], mid], "out": [c["nw"]]},
                 {"id": q, "type": "vertex", "in": [c["se"]], "out": [mid, c["ne"]]}],
                [{"id": mid, "edge": mid}])

    def ms_build(c):
        return ([{"id": p, "type": "vertex", "in": [c["sw"], c["se"]], "out": [mid]},
                 {"id": q, "type": "vertex", "in": [mid], "out": [c["nw"], c["ne"]]}],
                [{"id": mid, "edge": mid}])

    h_data, h_origin = _rewire(data, crossing_id, h_build)
    ms_data, ms_origin = _rewire(data, crossing_id, ms_build)
    return (Diagram.from_dict(h_data), h_origin, mid), (Diagram.from_dict(ms_data), ms_origin, mid)


def skein_check(d: Diagram, crossing_id, base_arc, lat=None) -> bool:
    """Check the skein relation at one crossing with the base point on ``base_arc``."""
    mer = meridian_map(d, lat)
    c = d.nodes[crossing_id]
    if not isinstance(c, Crossing):
        raise KeyError(crossing_id)
    if base_arc in d.arcs and d.tail[base_arc][0] == crossing_id and d.head[base_arc][0] == crossing_id:
        raise BasePointOnSite(f"base arc {base_arc!r} lies inside the crossing tangle")
    t = mer[d.arcs[c.sw]]
    s = mer[d.arcs[c.se]]
    nvars = t.rank
    (hd, h_origin, mid), (msd, ms_origin, _) = skein_resolutions(d, crossing_id)
    h_mer = {e: (s / t if o == mid else mer[o]) for e, o in h_origin.items()}
    ms_mer = {e: (s * t if o == mid else mer[o]) for e, o in ms_origin.items()}
    lhs = state_sum(decorate(d, base_arc), mer)
    h_val = state_sum(decorate(hd, base_arc), h_mer)
    ms_val = state_sum(decorate(msd, base_arc), ms_mer)
    bt, bs, bts = symmetric_binomial(t), symmetric_binomial(s), symmetric_binomial(t * s)
    th, sh = t.sqrt(), s.sqrt()
    if c.sign == "pos":
        c1 = RingFraction(-_mono((th * sh).inv()), bt * bs)
        c2 = RingFraction(_mono(sh.inv()), bt * bts)
    else:
        c1 = RingFraction(-_mono(th * sh), bt * bs)
        c2 = RingFraction(_mono(sh), bt * bts)
    return fraction_eq(lhs, c1 * h_val + c2 * ms_val)
