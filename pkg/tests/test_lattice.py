import pytest

from spatial_alex.errors import InvalidBasis, NonFreeQuotient, NonSquare, UnknownEdge
from spatial_alex.lattice import HalfMonomial, build_lattice, render_monomial


def test_vertex_relation_reduces_rank():
    lat = build_lattice(["a", "b", "c"], [(["a"], ["b", "c"])])
    assert lat.rank == 2
    assert lat.meridian("a") == lat.meridian("b") * lat.meridian("c")


def test_explicit_basis_sets_order():
    lat = build_lattice(["a", "b", "c"], [(["a"], ["b", "c"])], basis=["a", "b"])
    assert lat.basis_names == ("a", "b")
    assert lat.meridian("c").halves == (2, -2)


def test_relations_project_to_zero():
    incid = [(["a", "c"], ["b"]), (["b"], ["a", "c"])]
    lat = build_lattice(["a", "b", "c"], incid)
    for row in lat.relation_matrix:
        assert all(x == 0 for x in lat.project(row))


def test_torsion_is_rejected():
    with pytest.raises(NonFreeQuotient):
        build_lattice(["a", "b"], [(["a", "a"], ["b", "b"]), (["b", "b"], ["a", "a"])])


def test_bad_basis():
    with pytest.raises(UnknownEdge):
        build_lattice(["a"], [], basis=["z"])
    with pytest.raises(InvalidBasis):
        build_lattice(["a", "b"], [], basis=["a", "a"])


def test_half_monomial_arithmetic():
    x = HalfMonomial((2, -1))
    y = HalfMonomial((1, 1))
    assert (x * y).halves == (3, 0)
    assert (x / x).is_identity
    assert x.inv().halves == (-2, 1)
    assert (x ** 2).sqrt() == x
    with pytest.raises(NonSquare):
        HalfMonomial((1, 0)).sqrt()
    assert not x.is_integral and HalfMonomial((2, 4)).is_integral


def test_rendering():
    assert render_monomial((2, -2), ["t", "s"]) == "t*s^-1"
    assert render_monomial((1, 0), ["t", "s"]) == "t^(1/2)"
    assert render_monomial((0, 0), ["t", "s"]) == "1"
    assert render_monomial((-3,), ["t"]) == "t^(-3/2)"
