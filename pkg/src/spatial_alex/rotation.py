"""Winding numbers of regions, local rotation contributions and Rot(D).

Crossing an arc of edge ``e`` from its right side to its left side multiplies
the winding number by the meridian of ``e``.  A counterclockwise circle thus
has winding ``t`` inside and rotation number ``t``.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping

from .diagram import Crossing, Diagram, Vertex
from .errors import InconsistentWinding, MalformedInput, NonIntegralRotation, NotALink
from .lattice import HalfMonomial, MeridianLattice, build_lattice


def diagram_lattice(d: Diagram, basis=None) -> MeridianLattice:
    incidences = [([d.arcs[a] for a in v.ins], [d.arcs[a] for a in v.outs]) for v in d.vertices]
    return build_lattice(d.edges, incidences, basis if basis is not None else d.basis)


def meridian_map(d: Diagram, lat) -> dict:
    """Edge id -> HalfMonomial, from a lattice or an explicit mapping."""
    if isinstance(lat, MeridianLattice):
        return lat.meridians()
    if isinstance(lat, Mapping):
        return dict(lat)
    if lat is None:
        return diagram_lattice(d).meridians()
    raise TypeError(f"cannot derive meridians from {type(lat).__name__}")


def _identity(mer):
    return HalfMonomial.identity(next(iter(mer.values())).rank)


def _component_index(d: Diagram, component):
    if component is None:
        if not d.is_connected():
            raise MalformedInput("diagram is disconnected; choose a component")
        return 0
    return component


def _dual_edges(d: Diagram, comp):
    """(left key, right key, edge) for every arc or loop of a component."""
    out = []
    for a in comp.arcs:
        out.append((("f", d.local_face_of((a, 0))), ("f", d.local_face_of((a, 1))), d.arcs[a]))
    for lid in comp.loops:
        fl = d.free_loops[lid]
        inside, outside = ("L", lid, "in"), ("L", lid, "out")
        left, right = (inside, outside) if fl.orientation == "ccw" else (outside, inside)
        out.append((left, right, fl.edge))
    return out


def local_windings(d: Diagram, lat, component=None) -> dict:
    """Winding numbers keyed by local face key, for one planar component."""
    idx = _component_index(d, component)
    mer = meridian_map(d, lat)
    comp = d.components()[idx]
    duals = _dual_edges(d, comp)
    adj: dict = {}
    for left, right, e in duals:
        t = mer[e]
        adj.setdefault(right, []).append((left, t))
        adj.setdefault(left, []).append((right, t.inv()))
    start = d.component_outer_key(idx)
    values = {start: _identity(mer)}
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for g, step in adj.get(f, ()):
            if g not in values:
                values[g] = values[f] * step
                queue.append(g)
    for left, right, e in duals:
        if values[left] != values[right] * mer[e]:
            raise InconsistentWinding(f"winding numbers around edge {e!r} do not close up")
    return values


def winding_numbers(d: Diagram, lat, component=None) -> dict:
    """Region id -> winding number for one planar component (the whole diagram if connected)."""
    return {d.local_region(k): v for k, v in local_windings(d, lat, component).items()}


def chi_vertex(d: Diagram, v: Vertex, winding: Mapping) -> HalfMonomial:
    between_in, between_out, _ = d.vertex_sectors(v)
    acc = None
    for r in between_in + between_out:
        acc = winding[r] if acc is None else acc * winding[r]
    if acc is None:
        return _identity(winding)
    return acc.sqrt()


def chi_crossing(d: Diagram, c: Crossing, winding: Mapping) -> HalfMonomial:
    corners = d.crossing_corners(c)
    return (winding[corners["S"]] * winding[corners["N"]]).sqrt()


def node_product(d: Diagram, lat, component=None) -> HalfMonomial:
    """Product of chi over the vertices and double points of one component."""
    idx = _component_index(d, component)
    w = winding_numbers(d, lat, idx)
    comp = d.components()[idx]
    acc = _identity(w)
    for nid in comp.nodes:
        n = d.nodes[nid]
        acc = acc * (chi_vertex(d, n, w) if isinstance(n, Vertex) else chi_crossing(d, n, w))
    return acc


def _component_rot(d: Diagram, mer, idx) -> HalfMonomial:
    local = local_windings(d, mer, idx)
    w = {d.local_region(k): v for k, v in local.items()}
    acc = _identity(mer)
    for v in local.values():
        acc = acc * v
    nodes = _identity(mer)
    for nid in d.components()[idx].nodes:
        n = d.nodes[nid]
        nodes = nodes * (chi_vertex(d, n, w) if isinstance(n, Vertex) else chi_crossing(d, n, w))
    if not nodes.is_integral:
        raise NonIntegralRotation(f"vertex/crossing product {nodes.halves} is not integral")
    result = acc / nodes
    if not result.is_integral:
        raise NonIntegralRotation(f"rotation number {result.halves} is not integral")
    return result


def rot(d: Diagram, lat=None) -> HalfMonomial:
    """Extended rotation number; the product over connected components."""
    mer = meridian_map(d, lat)
    acc = _identity(mer)
    for i in range(len(d.components())):
        acc = acc * _component_rot(d, mer, i)
    return acc


def classical_w(d: Diagram, lat=None) -> int:
    """Whitney index: exponent sum of Rot under every meridian -> 1."""
    if d.vertices:
        raise NotALink("classical rotation is defined for link diagrams only")
    mer = meridian_map(d, lat)
    r = rot(d, mer)
    # every basis element of a link lattice is a component meridian
    total = sum(r.halves)
    return total // 2
