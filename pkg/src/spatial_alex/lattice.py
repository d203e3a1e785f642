"""Meridian lattice H_1 of a graph complement and monomials with half-integer exponents.

Exponents are stored doubled ("halves") so that square roots of meridians are
exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .errors import EmptyGraph, InvalidBasis, NonFreeQuotient, NonSquare, UnknownEdge, LatticeMismatch


@dataclass(frozen=True, order=True)
class HalfMonomial:
    """The group element prod b_i^(halves_i / 2)."""

    halves: tuple[int, ...]

    @classmethod
    def identity(cls, rank: int) -> "HalfMonomial":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.halves)

    def _check(self, other: "HalfMonomial") -> None:
        if len(other.halves) != len(self.halves):
            raise LatticeMismatch(f"rank {len(self.halves)} vs {len(other.halves)}")

    def __mul__(self, other: "HalfMonomial") -> "HalfMonomial":
        self._check(other)
        return HalfMonomial(tuple(a + b for a, b in zip(self.halves, other.halves)))

    def __truediv__(self, other: "HalfMonomial") -> "HalfMonomial":
        self._check(other)
        return HalfMonomial(tuple(a - b for a, b in zip(self.halves, other.halves)))

    def __pow__(self, n: int) -> "HalfMonomial":
        return HalfMonomial(tuple(a * n for a in self.halves))

    def inv(self) -> "HalfMonomial":
        return HalfMonomial(tuple(-a for a in self.halves))

    def sqrt(self) -> "HalfMonomial":
        if not self.is_integral:
            raise NonSquare(f"{self.halves} has odd half-exponents")
        return HalfMonomial(tuple(a // 2 for a in self.halves))

    @property
    def is_integral(self) -> bool:
        return all(a % 2 == 0 for a in self.halves)

    @property
    def is_identity(self) -> bool:
        return not any(self.halves)

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, 2) for a in self.halves)

    def render(self, names: Sequence[str]) -> str:
        return render_monomial(self.halves, names)


def mul(a: HalfMonomial, b: HalfMonomial) -> HalfMonomial:
    return a * b


def inv(a: HalfMonomial) -> HalfMonomial:
    return a.inv()


def sqrt(a: HalfMonomial) -> HalfMonomial:
    return a.sqrt()


def _render_exponent(h: int) -> str:
    if h % 2 == 0:
        return str(h // 2)
    return f"({h}/2)"


def render_monomial(halves: Sequence[int], names: Sequence[str]) -> str:
    """Render e.g. ``t*s^-1`` or ``t^(1/2)``; the identity renders as ``1``."""
    parts = []
    for name, h in zip(names, halves):
        if h == 0:
            continue
        if h == 2:
            parts.append(name)
        else:
            parts.append(f"{name}^{_render_exponent(h)}")
    return "*".join(parts) if parts else "1"


class MeridianLattice:
    """Z^E modulo the vertex relations, with a basis drawn from the edges.

    ``projection[i][j]`` is the coordinate of the meridian of edge ``edge_ids[j]``
    along basis element ``i``.
    """

    def __init__(self, edge_ids, relation_matrix, basis_names, projection):
        self.edge_ids = tuple(edge_ids)
        self.relation_matrix = tuple(tuple(r) for r in relation_matrix)
        self.basis_names = tuple(basis_names)
        self.projection = tuple(tuple(r) for r in projection)
        self._col = {e: j for j, e in enumerate(self.edge_ids)}

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    def __repr__(self):
        return f"MeridianLattice(edges={list(self.edge_ids)}, basis={list(self.basis_names)})"

    def meridian(self, edge_id) -> HalfMonomial:
        try:
            j = self._col[edge_id]
        except KeyError:
            raise UnknownEdge(edge_id) from None
        return HalfMonomial(tuple(2 * row[j] for row in self.projection))

    def meridians(self) -> dict:
        return {e: self.meridian(e) for e in self.edge_ids}

    def project(self, vector: Sequence[int]) -> tuple[int, ...]:
        if len(vector) != len(self.edge_ids):
            raise LatticeMismatch("vector length differs from edge count")
        return tuple(sum(p * v for p, v in zip(row, vector)) for row in self.projection)

    def identity(self) -> HalfMonomial:
        return HalfMonomial.identity(self.rank)


def _vertex_rows(edges: Sequence, vertex_incidences) -> list[list[int]]:
    col = {e: j for j, e in enumerate(edges)}
    if isinstance(vertex_incidences, Mapping):
        vertex_incidences = list(vertex_incidences.values())
    rows = []
    for ins, outs in vertex_incidences:
        row = [0] * len(edges)
        for e in ins:
            if e not in col:
                raise UnknownEdge(e)
            row[col[e]] += 1
        for e in outs:
            if e not in col:
                raise UnknownEdge(e)
            row[col[e]] -= 1
        rows.append(row)
    return rows


def build_lattice(edges: Iterable, vertex_incidences, basis: Sequence | None = None) -> MeridianLattice:
    """Build the meridian lattice.

    ``vertex_incidences`` is a sequence (or mapping) of ``(incoming, outgoing)``
    edge-id lists, one per vertex. The default basis is the first ``k`` edges
    that survive a unimodular Gauss-Jordan elimination pivoting from the last
    column backwards; ``basis`` overrides the choice (and the order).
    """
    edges = list(edges)
    if not edges:
        raise EmptyGraph("graph has no edges")
    rows = _vertex_rows(edges, vertex_incidences)
    nonzero = [r for r in rows if any(r)]
    if nonzero:
        factors = invariant_factors(Matrix(nonzero), domain=ZZ)
        bad = [int(f) for f in factors if int(f) not in (0, 1)]
        if bad:
            raise NonFreeQuotient(f"invariant factors {bad} signal torsion")

    n = len(edges)
    if basis is not None:
        basis = list(basis)
        unknown = [b for b in basis if b not in edges]
        if unknown:
            raise UnknownEdge(unknown[0])
        if len(set(basis)) != len(basis):
            raise InvalidBasis("repeated basis edge")
        forbidden = {edges.index(b) for b in basis}
    else:
        forbidden = set()

    work = [list(r) for r in nonzero]
    pivots: dict[int, list[int]] = {}
    for i in range(len(work)):
        row = work[i]
        if not any(row):
            continue
        p = next((j for j in reversed(range(n)) if j not in forbidden and j not in pivots
                  and abs(row[j]) == 1), None)
        if p is None:
            raise InvalidBasis("no unimodular pivot available for the requested basis")
        if row[p] < 0:
            row[:] = [-x for x in row]
        for k in range(len(work)):
            if k != i and work[k][p]:
                f = work[k][p]
                work[k][:] = [a - f * b for a, b in zip(work[k], row)]
        pivots[p] = row

    free = [j for j in range(n) if j not in pivots]
    if basis is not None:
        if sorted(free) != sorted(forbidden):
            raise InvalidBasis(f"{basis} is not a basis of the meridian lattice")
        order = [edges.index(b) for b in basis]
    else:
        order = free
    idx = {j: i for i, j in enumerate(order)}
    projection = [[0] * n for _ in order]
    for j in order:
        projection[idx[j]][j] = 1
    for p, row in pivots.items():
        # row[p] == 1 and row is zero on the other pivot columns
        for j in order:
            if row[j]:
                projection[idx[j]][p] = -row[j]
    return MeridianLattice(edges, rows, [edges[j] for j in order], projection)
