"""Normalized multi-variable Alexander polynomial and its one-variable specializations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .diagram import Diagram, decorate
from .errors import NotTrivalent, UnbalancedColoring
from .graphalg import check_balance
from .lattice import HalfMonomial, MeridianLattice
from .ring import LaurentPoly, RingFraction, canonicalize, fraction_eq, symmetric_binomial
from .rotation import diagram_lattice, meridian_map, rot
from .statesum import state_sum


@dataclass(frozen=True)
class AlexanderValue:
    value: RingFraction
    basis: tuple
    rot: HalfMonomial
    raw_sum: RingFraction

    @property
    def polynomial(self) -> LaurentPoly | None:
        return self.value.as_poly()

    def render(self) -> str:
        return self.value.render(self.basis)


def normalize(rotation: HalfMonomial, raw: RingFraction) -> RingFraction:
    """-Rot^(1/2) * <D>."""
    return raw * LaurentPoly.monomial(rotation.sqrt(), -1)


def alexander(d: Diagram, lat=None, base=None) -> AlexanderValue:
    """Delta = -Rot(D)^(1/2) <D>, with the base point on ``base`` (default: first arc)."""
    if lat is None:
        lat = diagram_lattice(d)
    mer = meridian_map(d, lat)
    names = tuple(lat.basis_names) if isinstance(lat, MeridianLattice) else tuple(f"x{i}" for i in range(next(iter(mer.values())).rank))
    r = rot(d, mer)
    if base is None:
        base = d.default_base()
    raw = state_sum(decorate(d, base), mer)
    return AlexanderValue(canonicalize(normalize(r, raw)), names, r, raw)


# ------------------------------------------------------------- specialization
def _basis_colors(lat: MeridianLattice, coloring: Mapping) -> list[Fraction]:
    return [Fraction(coloring[b]) for b in lat.basis_names]


def specialization_map(d: Diagram, lat: MeridianLattice, coloring: Mapping):
    """Monomial map halves -> (halves of t,) for meridian e -> t^c(e)."""
    check_balance(d, coloring)
    colors = _basis_colors(lat, coloring)

    def fn(halves):
        x = sum(h * c for h, c in zip(halves, colors))
        if x.denominator != 1:
            raise UnbalancedColoring(f"exponent {x / 2} is not a half-integer")
        return (int(x),)

    return fn


def specialize(value, d: Diagram, lat: MeridianLattice, coloring: Mapping):
    """Apply the ring map sending each meridian to t^c(e)."""
    fn = specialization_map(d, lat, coloring)
    if isinstance(value, AlexanderValue):
        value = value.value
    if isinstance(value, HalfMonomial):
        return HalfMonomial(fn(value.halves))
    return value.map_monomials(fn, 1)


def colored_meridians(d: Diagram, coloring: Mapping) -> dict:
    """Rank-one meridian map e -> t^c(e) for the single-variable pipeline."""
    check_balance(d, coloring)
    out = {}
    for e in d.edges:
        h = Fraction(coloring[e]) * 2
        if h.denominator != 1:
            raise UnbalancedColoring(f"color {coloring[e]} of {e!r} is not a half-integer")
        out[e] = HalfMonomial((int(h),))
    return out


def colored_state_sum(d: Diagram, coloring: Mapping, base=None) -> RingFraction:
    """<D, c>: the state sum computed directly with meridians t^c(e)."""
    if base is None:
        base = d.default_base()
    return state_sum(decorate(d, base), colored_meridians(d, coloring))


def specialization_agrees(d: Diagram, coloring: Mapping, lat=None, base=None) -> bool:
    lat = lat or diagram_lattice(d)
    if base is None:
        base = d.default_base()
    multi = state_sum(decorate(d, base), lat)
    return fraction_eq(specialize(multi, d, lat, coloring), colored_state_sum(d, coloring, base))


def moy_relation_check(d: Diagram, coloring: Mapping, lat=None) -> bool:
    """Phi_c(Delta_G) = Delta_(G,c)(t) * (t^(1/2) - t^(-1/2))^(|V|-1)."""
    for v in d.vertices:
        if len(v.ins) + len(v.outs) != 3:
            raise NotTrivalent(f"vertex {v.id!r} has valence {len(v.ins) + len(v.outs)}")
    lat = lat or diagram_lattice(d)
    delta = alexander(d, lat)
    lhs = specialize(delta.value, d, lat, coloring)
    colored = colored_state_sum(d, coloring)
    curl = specialize(delta.rot, d, lat, coloring).halves[0]
    t = HalfMonomial((2,))
    plus = symmetric_binomial(t)
    minus = -plus
    k = len(d.vertices) - 1
    one = LaurentPoly.one(1)
    delta_colored = colored * RingFraction(_half_power(curl), minus ** k if k else one)
    rhs = delta_colored * (plus ** k if k else one)
    return fraction_eq(lhs, rhs)


def _half_power(halves_of_rot: int) -> LaurentPoly:
    """t^(phi/2) where phi is stored in half units, i.e. t^(halves/4)."""
    if halves_of_rot % 2:
        raise UnbalancedColoring("curliness exponent is not a half-integer")
    return LaurentPoly.monomial((halves_of_rot // 2,))


# --------------------------------------------------------------- utilities
def scale_exponents(value: RingFraction, factor: int = 4) -> RingFraction:
    """Substitute t_i -> t_i^factor in every variable."""
    return value.map_monomials(lambda h: tuple(factor * x for x in h), value.nvars)


def rebase(value, old: MeridianLattice, new: MeridianLattice):
    """Re-express a value written in ``old``'s basis in ``new``'s basis."""
    images = [new.meridian(b).halves for b in old.basis_names]

    def fn(halves):
        out = [0] * new.rank
        for h, img in zip(halves, images):
            for i, x in enumerate(img):
                out[i] += h * x
        return tuple(x // 2 for x in out)

    if isinstance(value, HalfMonomial):
        return HalfMonomial(fn(value.halves))
    return value.map_monomials(fn, new.rank)
