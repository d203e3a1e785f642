import pytest

from spatial_alex import load_fixture
from spatial_alex.errors import NotTrivalent, UnbalancedColoring
from spatial_alex.graphalg import positive_coloring
from spatial_alex.invariant import (alexander, colored_state_sum, moy_relation_check, rebase, scale_exponents,
                                    specialization_agrees, specialize)
from spatial_alex.lattice import HalfMonomial
from spatial_alex.ring import fraction_eq
from spatial_alex.rotation import diagram_lattice

EXPECTED = {
    "circle": "1/(t^(1/2)-t^(-1/2))",
    "fig5": "t^(1/2)*s^(1/2)-t^(-1/2)*s^(-1/2)",
    "theta": "b^(1/2)-b^(-1/2)",
    "hopf": "p^(-1/2)*q^(-1/2)",
    "trefoil": "(k^(-1/2)-k^(-3/2)+k^(-5/2))/(k^(1/2)-k^(-1/2))",
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_fixture_values(name):
    assert alexander(load_fixture(name)).render() == EXPECTED[name]


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_value_independent_of_base(name):
    d = load_fixture(name)
    lat = diagram_lattice(d)
    values = [alexander(d, lat, b).value for b in d.base_candidates() if d.left_region(b) != d.right_region(b)]
    assert all(fraction_eq(values[0], v) for v in values)


def test_specialization_commutes():
    for name in ("fig5", "theta", "hopf", "trefoil"):
        d = load_fixture(name)
        c = positive_coloring(d)
        assert specialization_agrees(d, c)
        assert specialization_agrees(d, {e: 2 * v for e, v in c.items()})


def test_half_integer_coloring_rejected():
    d = load_fixture("circle")
    with pytest.raises(UnbalancedColoring):
        colored_state_sum(d, {"t": "1/3"})


def test_moy_relation():
    for name in ("fig5", "theta"):
        d = load_fixture(name)
        assert moy_relation_check(d, positive_coloring(d))
    with pytest.raises(NotTrivalent):
        from spatial_alex.moves import _QUAD, _graph
        moy_relation_check(_graph(_QUAD, ("a2", "left")), {"a": 1, "c": 1, "a2": 1, "c2": 1})


def test_specialize_rot():
    d = load_fixture("fig5")
    lat = diagram_lattice(d, ["t", "s"])
    r = alexander(d, lat).rot
    assert specialize(r, d, lat, {"t": 1, "s": 2, "m": 3}) == HalfMonomial((-2,))


def test_exponent_scaling_and_rebase():
    d = load_fixture("fig5")
    a = diagram_lattice(d, ["t", "s"])
    b = diagram_lattice(d, ["m", "s"])
    value = alexander(d, a).value
    moved = rebase(value, a, b)
    assert fraction_eq(rebase(moved, b, a), value)
    scaled = scale_exponents(value, 4)
    assert scaled.render(["t", "s"]) == "t^2*s^2-t^-2*s^-2"
