"""Symmetry types, the isotropy lattice, and critical-orbit families.

A symmetry type is a conjugacy class of subgroups; points sharing a type
form a stratum.  The lattice order [H] < [K] holds when some conjugate of
H is strictly contained in K; downward in that order means larger fixed
spaces and less symmetry.

For a finite group every orbit is a finite point set, so an orbit on the
unit sphere is isolated inside its stratum exactly when the stratum meets
the sphere in isolated points, i.e. when the fixed space of the isotropy
is a line.  The classical criterion (critical for every invariant
potential iff isolated in its stratum) then reduces to scanning realized
types with one-dimensional fixed space; those rays are returned as the
principal critical orbit families.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import rationals as ra
from .errors import DimensionMismatch, NoUniqueMinimum
from .groups import (
    FiniteGroupRep,
    Subgroup,
    all_subgroups,
    conjugate_subgroup,
    fixed_subspace,
    isotropy_subgroup,
)


@dataclass(frozen=True)
class SymmetryType:
    """A conjugacy class of subgroups with its fixed-space data."""

    label: str
    representative: Subgroup
    conjugates: tuple[Subgroup, ...]
    fix_dim: int
    realized: bool

    @property
    def order(self) -> int:
        return self.representative.order

    def contains_subgroup(self, sub: Subgroup) -> bool:
        return any(c.members == sub.members for c in self.conjugates)


@dataclass(frozen=True)
class IsotropyLattice:
    types: tuple[SymmetryType, ...]
    order_pairs: frozenset[tuple[int, int]]
    principal_index: int | None

    def less(self, i: int, j: int) -> bool:
        return (i, j) in self.order_pairs

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering pairs of the order relation, for diagram output."""
        edges = []
        for (i, j) in sorted(self.order_pairs):
            if not any(
                (i, k) in self.order_pairs and (k, j) in self.order_pairs
                for k in range(len(self.types))
            ):
                edges.append((i, j))
        return edges


@dataclass(frozen=True)
class RayFamily:
    """A realized symmetry type whose fixed space is a line."""

    symmetry: SymmetryType
    direction: ra.Vec
    unit: tuple[float, ...]


@dataclass(frozen=True)
class PrincipalCriticalOrbitSet:
    rays: tuple[RayFamily, ...]


def _span_contains_all(span_rows, vectors, ncols) -> bool:
    reducer = ra.RowReducer(ncols)
    for row in span_rows:
        reducer.add(list(row))
    return all(reducer.contains(list(v)) for v in vectors)


def _pointwise_stabilizer(rep: FiniteGroupRep, basis_vecs) -> tuple[int, ...]:
    return tuple(
        i
        for i, e in enumerate(rep.elements)
        if all(ra.mat_vec(e.matrix, b) == b for b in basis_vecs)
    )


def _is_realized(rep: FiniteGroupRep, sub: Subgroup, seed: int) -> bool:
    """Does some point have isotropy exactly this subgroup?

    Tested on a seeded generic rational point of Fix(H).  A sample whose
    isotropy is larger is conclusive only when the larger fixed space
    swallows Fix(H) entirely; otherwise the sample was non-generic and is
    redrawn.  After the draw budget the pointwise stabilizer of Fix(H)
    settles the question exactly.
    """
    basis_vecs = fixed_subspace(rep, sub)
    if not basis_vecs:
        return sub.order == rep.order
    rng = random.Random(f"{seed}:{','.join(map(str, sub.members))}")
    n = rep.dim
    for _ in range(8):
        coeffs = [Fraction(rng.randint(1, 9)) for _ in basis_vecs]
        x = tuple(
            sum(c * b[i] for c, b in zip(coeffs, basis_vecs)) for i in range(n)
        )
        iso = isotropy_subgroup(rep, x)
        if iso.members == sub.members:
            return True
        if _span_contains_all(fixed_subspace(rep, iso), basis_vecs, n):
            return False
    return _pointwise_stabilizer(rep, basis_vecs) == sub.members


def symmetry_types(rep: FiniteGroupRep, seed: int = 0) -> list[SymmetryType]:
    """Conjugacy classes of all subgroups, with fix_dim and realized flags.

    Deterministic: subgroups are enumerated in sorted order and classes are
    labeled T0, T1, ... with orders ascending.
    """
    subs = all_subgroups(rep)
    assigned: set[tuple[int, ...]] = set()
    types: list[SymmetryType] = []
    for sub in subs:
        if sub.members in assigned:
            continue
        conj_members = sorted(
            {conjugate_subgroup(rep, sub, g).members for g in range(rep.order)}
        )
        assigned.update(conj_members)
        representative = Subgroup(conj_members[0])
        fix_dim = len(fixed_subspace(rep, representative))
        realized = _is_realized(rep, representative, seed)
        types.append(
            SymmetryType(
                label=f"T{len(types)}",
                representative=representative,
                conjugates=tuple(Subgroup(m) for m in conj_members),
                fix_dim=fix_dim,
                realized=realized,
            )
        )
    return types


def stratum_of(rep: FiniteGroupRep, point, types=None) -> SymmetryType:
    """The symmetry type of the isotropy subgroup of an exact point."""
    x = ra.vec(point)
    if len(x) != rep.dim:
        raise DimensionMismatch("point dimension mismatch")
    if types is None:
        types = symmetry_types(rep)
    iso = isotropy_subgroup(rep, x)
    for t in types:
        if t.contains_subgroup(iso):
            return t
    raise AssertionError("isotropy subgroup missing from the enumerated types")


def _class_strictly_below(t_low: SymmetryType, t_high: SymmetryType) -> bool:
    high = set(t_high.representative.members)
    for c in t_low.conjugates:
        mem = set(c.members)
        if mem < high:
            return True
    return False


def isotropy_lattice(rep: FiniteGroupRep, types=None) -> IsotropyLattice:
    if types is None:
        types = symmetry_types(rep)
    types = tuple(types)
    pairs = set()
    for i, ti in enumerate(types):
        for j, tj in enumerate(types):
            if i != j and _class_strictly_below(ti, tj):
                pairs.add((i, j))
    principal = _principal_index(types, pairs)
    return IsotropyLattice(types, frozenset(pairs), principal)


def _principal_index(types, pairs) -> int | None:
    realized = [i for i, t in enumerate(types) if t.realized]
    minimal = [
        i
        for i in realized
        if not any((j, i) in pairs for j in realized if j != i)
    ]
    return minimal[0] if len(minimal) == 1 else None


def principal_stratum(rep: FiniteGroupRep, lattice: IsotropyLattice | None = None) -> SymmetryType:
    """The unique minimal realized type: the open dense stratum's type."""
    if lattice is None:
        lattice = isotropy_lattice(rep)
    if lattice.principal_index is None:
        raise NoUniqueMinimum("no unique minimal realized symmetry type")
    return lattice.types[lattice.principal_index]


def principal_critical_orbits(rep: FiniteGroupRep, types=None) -> PrincipalCriticalOrbitSet:
    """Ray families critical for every invariant potential on the sphere."""
    if types is None:
        types = symmetry_types(rep)
    rays = []
    for t in types:
        if not t.realized or t.fix_dim != 1:
            continue
        direction = fixed_subspace(rep, t.representative)[0]
        norm = float(sum(c * c for c in direction)) ** 0.5
        unit = tuple(float(c) / norm for c in direction)
        rays.append(RayFamily(symmetry=t, direction=direction, unit=unit))
    return PrincipalCriticalOrbitSet(tuple(rays))
