import pytest

from spatial_alex import load_fixture
from spatial_alex.errors import InvarianceViolation, PatternNotFound
from spatial_alex.fixtures import NAMES
from spatial_alex.invariant import alexander
from spatial_alex.moves import (FRAMED_FAMILIES, PROP1_ITEMS, MoveSite, apply, apply_detailed, apply_with_inverse,
                                candidate_sites, canonical_form, check_run, fuzz, isomorphic, replay, verify_prop1,
                                verify_run)
from spatial_alex.ring import fraction_eq
from spatial_alex.rotation import diagram_lattice, rot


def test_kink_insert_then_remove_is_identity():
    d = load_fixture("circle")
    new, inverse = apply_with_inverse(d, MoveSite("R1+", {"arc": "L", "side": "left"}, "insert"))
    assert len(new.crossings) == 1
    assert isomorphic(apply(new, inverse), d)


@pytest.mark.parametrize("side, power", [("left", 2), ("right", -2)])
def test_double_kink_scales_rot_and_keeps_delta(side, power):
    d = load_fixture("circle")
    new = apply(d, MoveSite("R1'", {"arc": "L", "side": side}, "insert"))
    assert len(new.crossings) == 2
    lat = diagram_lattice(d)
    t = lat.meridian("t")
    assert rot(new, lat) == rot(d, lat) * t ** power
    assert fraction_eq(alexander(new, lat).value, alexander(d, lat).value)


def test_r2_adds_two_crossings():
    d = load_fixture("fig5")
    site = MoveSite("R2", {"a": "m", "a_side": "left", "b": "t1", "b_side": "left", "over": "a"}, "insert")
    assert len(apply(d, site).crossings) == len(d.crossings) + 2


def test_remove_without_pattern():
    d = load_fixture("trefoil")
    with pytest.raises(PatternNotFound):
        apply(d, MoveSite("R1+", {"crossing": "c1", "side": "left"}, "remove"))


def test_site_aliases_and_serialisation():
    site = MoveSite("R1−", {"arc": "L", "side": "left"}, "insert")
    assert site.kind == "R1-" and site.family == "R1"
    assert MoveSite.from_dict(site.to_dict()) == site
    with pytest.raises(Exception):
        MoveSite("R9", {}, "insert")


@pytest.mark.parametrize("name", NAMES)
def test_every_insert_site_has_an_inverse(name):
    d = load_fixture(name)
    lat = diagram_lattice(d)
    for framed in (True, False):
        sites = [s for group in candidate_sites(d, framed).values() for ss in group.values() for s in ss]
        for site in sites:
            res = apply_detailed(d, site)
            if not res.kinks:
                assert rot(res.diagram, lat) == rot(d, lat)
            if res.inverse is not None:
                assert isomorphic(apply(res.diagram, res.inverse), d)


def test_canonical_form_ignores_ids():
    d = load_fixture("fig5")
    data = d.to_dict()
    ren = {"B": "bottom", "T": "top", "X": "cross"}
    for n in data["nodes"]:
        n["id"] = ren[n["id"]]
    from spatial_alex import Diagram
    assert canonical_form(Diagram.from_dict(data)) == canonical_form(d)
    assert not isomorphic(d, load_fixture("theta"))


def test_fuzz_is_reproducible():
    a = fuzz(load_fixture("fig5"), 1, 30, framed=True)
    b = fuzz(load_fixture("fig5"), 1, 30, framed=True)
    assert a.script == b.script
    assert replay(load_fixture("fig5"), a.script)[-1] == a.diagrams[-1]


def test_framed_fuzz_uses_framed_moves():
    run = fuzz(load_fixture("fig5"), 1, 50, framed=True)
    assert {s.family for s in run.sites} <= set(FRAMED_FAMILIES)
    check_run(run)
    lat = diagram_lattice(run.diagrams[0])
    target = alexander(run.diagrams[0], lat).value
    assert all(fraction_eq(alexander(d, lat).value, target) for d in run.diagrams)


def test_circle_delta_constant():
    run = fuzz(load_fixture("circle"), 2, 30, framed=True)
    lat = diagram_lattice(run.diagrams[0])
    for d in run.diagrams:
        assert alexander(d, lat).render() == "1/(t^(1/2)-t^(-1/2))"


def test_unframed_bracket_drift_is_tracked():
    run = fuzz(load_fixture("fig5"), 1, 50, framed=False)
    steps = verify_run(run)
    assert all(s.ok for s in steps)
    assert any(run.kinks)


def test_tampered_run_is_reported():
    run = fuzz(load_fixture("fig5"), 3, 20, framed=False)
    k = next(i for i, ks in enumerate(run.kinks) if ks)
    run.kinks[k] = []
    with pytest.raises(InvarianceViolation) as err:
        check_run(run)
    assert err.value.script == run.script[: k + 1]


def test_fuzz_requires_a_move():
    with pytest.raises(Exception):
        fuzz(load_fixture("circle"), 0, 0)


@pytest.mark.parametrize("item", PROP1_ITEMS)
def test_local_rotation_relations(item):
    assert verify_prop1(item)


def test_unknown_relation_item():
    with pytest.raises(ValueError):
        verify_prop1("viii")
