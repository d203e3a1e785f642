import json

import pytest

from spatial_alex import Diagram, decorate, faces, load_fixture, parse, serialize
from spatial_alex.errors import (DanglingArc, InconsistentOuter, MalformedInput, MarkedRegionsCoincide,
                                 NonPlanarMap, SinkOrSourceVertex)
from spatial_alex.fixtures import NAMES, fixture_text


def _theta_with(change):
    data = json.loads(fixture_text("theta"))
    change(data)
    return data


@pytest.mark.parametrize("name", NAMES)
def test_fixture_round_trip(name):
    d = load_fixture(name)
    assert parse(serialize(d)) == d


def test_unknown_fixture():
    with pytest.raises(KeyError):
        load_fixture("nope")


@pytest.mark.parametrize("change, error", [
    (lambda d: d["nodes"][0].update({"in": []}), SinkOrSourceVertex),
    (lambda d: d["nodes"][0].update({"out": ["a"]}), DanglingArc),
    (lambda d: d["nodes"][0].update({"out": ["c", "a"]}), NonPlanarMap),
    (lambda d: d.pop("outer"), InconsistentOuter),
    (lambda d: d["arcs"].append({"id": "a", "edge": "a"}), MalformedInput),
])
def test_validation_errors(change, error):
    with pytest.raises(error):
        Diagram.from_dict(_theta_with(change))


def test_malformed_json():
    with pytest.raises(MalformedInput):
        parse("{not json")


def test_regions_of_fig5():
    d = load_fixture("fig5")
    table = faces(d)
    assert len(table.regular_regions) == 4
    assert table.unbounded_face in table.regular_regions
    assert set(table.circle_regions) == {"B", "T"}


def test_decoration_counts():
    for name in NAMES:
        d = load_fixture(name)
        dd = decorate(d, d.default_base())
        assert len(dd.regions) == len(dd.crossings) + 2
        assert len(dd.unmarked) == len(dd.crossings)


def test_crossing_sites_of_theta():
    d = load_fixture("theta")
    dd = decorate(d, "b")
    kinds = sorted(s.kind for s in dd.crossings)
    assert kinds == ["circle"] * 3


BRIDGE = {
    "edges": [{"id": "l"}, {"id": "e"}, {"id": "m"}],
    "arcs": [{"id": "l", "edge": "l"}, {"id": "e", "edge": "e"}, {"id": "m", "edge": "m"}],
    "nodes": [{"id": "u", "type": "vertex", "in": ["l"], "out": ["l", "e"]},
              {"id": "w", "type": "vertex", "in": ["e", "m"], "out": ["m"]}],
    "free_loops": [], "outer": {"arc": "e", "side": "left"}, "nesting": [],
}


def test_bridge_cannot_carry_base_point():
    d = Diagram.from_dict(BRIDGE)
    assert d.left_region("e") == d.right_region("e")
    with pytest.raises(MarkedRegionsCoincide):
        decorate(d, "e")
    assert d.default_base() != "e"
