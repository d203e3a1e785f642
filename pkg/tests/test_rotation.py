import json

import pytest

from spatial_alex import Diagram, load_fixture
from spatial_alex.errors import NotALink
from spatial_alex.fixtures import NAMES, fixture_text
from spatial_alex.rotation import classical_w, diagram_lattice, node_product, rot, winding_numbers


def _render(d, basis=None):
    lat = diagram_lattice(d, basis)
    return rot(d, lat).render(lat.basis_names)


def test_fixture_rotation_numbers():
    assert _render(load_fixture("circle")) == "t"
    assert _render(load_fixture("fig5"), ["t", "s"]) == "t*s^-1"
    assert _render(load_fixture("trefoil")) == "k^-2"


def test_circle_windings():
    d = load_fixture("circle")
    lat = diagram_lattice(d)
    w = winding_numbers(d, lat)
    assert sorted(x.halves for x in w.values()) == [(0,), (2,)]
    assert w[d.unbounded_region].is_identity


def test_reversed_circle():
    data = json.loads(fixture_text("circle"))
    data["free_loops"][0]["orientation"] = "cw"
    data["outer"]["side"] = "left"
    assert _render(Diagram.from_dict(data)) == "t^-1"


def test_classical_index():
    assert classical_w(load_fixture("circle")) == 1
    assert classical_w(load_fixture("trefoil")) == -2
    with pytest.raises(NotALink):
        classical_w(load_fixture("theta"))


def test_disjoint_union_multiplies():
    one = json.loads(fixture_text("circle"))
    two = json.loads(json.dumps(one))
    two["edges"].append({"id": "u"})
    two["free_loops"].append({"id": "M", "edge": "u", "orientation": "ccw", "face": None})
    d = Diagram.from_dict(two)
    lat = diagram_lattice(d, ["t", "u"])
    assert rot(d, lat).halves == (2, 2)


@pytest.mark.parametrize("name", NAMES)
def test_node_product_integral(name):
    d = load_fixture(name)
    lat = diagram_lattice(d)
    for i in range(len(d.components())):
        assert node_product(d, lat, i).is_integral


def test_winding_rule_across_every_arc():
    for name in NAMES:
        d = load_fixture(name)
        lat = diagram_lattice(d)
        w = winding_numbers(d, lat, 0)
        for a in d.base_candidates():
            t = lat.meridian(d.edge_of(a))
            assert w[d.left_region(a)] == w[d.right_region(a)] * t
