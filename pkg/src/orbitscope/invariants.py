"""Invariant rings of finite matrix groups, computed exactly.

The dimension count of each graded invariant space comes from the Molien
generating function; the basis itself comes from Reynolds averages of
monomials with exact rank bookkeeping.  A minimal integrity basis (MIB) is
grown degree by degree: at each degree the power products of the basis so
far are spanned first, then Reynolds candidates that enlarge the span are
appended, which guarantees minimality.

All greedy choices scan candidates in the canonical monomial order, so the
output is deterministic down to the coefficient level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import rationals as ra
from .errors import CapTooLow, DimensionMismatch, NotExpressible, NotInvariant
from .groups import FiniteGroupRep, InvariantMetric, invariant_metric
from .polynomials import (
    J_KIND,
    Monomial,
    Polynomial,
    act,
    mono_key,
    monomials_of_degree,
    reynolds,
    substitute,
)

# ---------------------------------------------------------------- utilities


def coefficient_vector(p: Polynomial, index: dict[Monomial, int]) -> list[Fraction]:
    v = [Fraction(0)] * len(index)
    for m, c in p.terms.items():
        v[index[m]] = c
    return v


def monomial_index(nvars: int, degree: int) -> tuple[list[Monomial], dict[Monomial, int]]:
    monos = monomials_of_degree(nvars, degree)
    return monos, {m: i for i, m in enumerate(monos)}


def jmonomials_of_xdegree(degrees, xdegree: int) -> list[Monomial]:
    """Exponent tuples e with sum(e_i * degrees[i]) == xdegree, canonical order."""
    k = len(degrees)
    out: list[Monomial] = []

    def rec(prefix, remaining, i):
        if i == k:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        d = degrees[i]
        for e in range(remaining // d, -1, -1):
            rec(prefix + [e], remaining - e * d, i + 1)

    rec([], xdegree, 0)
    return sorted(out, key=mono_key, reverse=True)


def jmonomial_xdegree(mono: Monomial, degrees) -> int:
    return sum(e * d for e, d in zip(mono, degrees))


# ------------------------------------------------------------- Molien series


@dataclass(frozen=True)
class MolienSeries:
    """Exact graded dimensions c_d of the invariant ring."""

    group_order: int
    coefficients: tuple[int, ...]

    def coefficient(self, d: int) -> int:
        return self.coefficients[d]

    @property
    def degree_cap(self) -> int:
        return len(self.coefficients) - 1


def _char_poly_reversed(t_mat: ra.Mat) -> list[Fraction]:
    """Coefficients of det(I - t*T) in ascending powers of t."""
    n = len(t_mat)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[0] = Fraction(1)
    for k in range(1, n + 1):
        total = Fraction(0)
        for subset in itertools.combinations(range(n), k):
            minor = tuple(
                tuple(t_mat[i][j] for j in subset) for i in subset
            )
            total += ra.mat_det(minor)
        coeffs[k] = (-1) ** k * total
    return coeffs


def _series_reciprocal(poly_coeffs: list[Fraction], cap: int) -> list[Fraction]:
    """Power series of 1/p(t) up to t^cap; requires p(0) == 1."""
    assert poly_coeffs[0] == 1
    out = [Fraction(0)] * (cap + 1)
    out[0] = Fraction(1)
    for m in range(1, cap + 1):
        acc = Fraction(0)
        for i in range(1, min(m, len(poly_coeffs) - 1) + 1):
            acc += poly_coeffs[i] * out[m - i]
        out[m] = -acc
    return out


def molien_series(rep: FiniteGroupRep, degree_cap: int) -> MolienSeries:
    """c_d = [t^d] (1/|G|) sum_g 1/det(1 - t T_g), exactly."""
    total = [Fraction(0)] * (degree_cap + 1)
    for e in rep.elements:
        series = _series_reciprocal(_char_poly_reversed(e.matrix), degree_cap)
        for d in range(degree_cap + 1):
            total[d] += series[d]
    inv_order = Fraction(1, rep.order)
    coeffs = []
    for d in range(degree_cap + 1):
        c = total[d] * inv_order
        if c.denominator != 1 or c < 0:
            raise ArithmeticError(f"non-integral Molien coefficient at degree {d}")
        coeffs.append(int(c))
    return MolienSeries(rep.order, tuple(coeffs))


# -------------------------------------------------- graded invariant spaces


def invariant_space_basis(rep: FiniteGroupRep, degree: int) -> list[Polynomial]:
    """Monic basis of the degree-`degree` invariant subspace.

    Reynolds images of monomials are scanned in canonical order and kept
    greedily by exact rank, then normalized monic.
    """
    monos, index = monomial_index(rep.dim, degree)
    reducer = ra.RowReducer(len(monos))
    basis = []
    for m in monos:
        image = reynolds(rep, Polynomial.monomial(m, 1))
        if image.is_zero():
            continue
        if reducer.add(coefficient_vector(image, index)):
            basis.append(image.monic())
    return basis


# -------------------------------------------------- minimal integrity basis


@dataclass(frozen=True)
class IntegrityBasis:
    """Minimal generating set of the invariant ring.

    ``relations`` is None until computed; use :func:`find_relations` and
    ``with_relations`` to attach them.
    """

    rep: FiniteGroupRep
    polys: tuple[Polynomial, ...]
    degrees: tuple[int, ...]
    relations: tuple[Polynomial, ...] | None = field(default=None)

    @property
    def k(self) -> int:
        return len(self.polys)

    @property
    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def with_relations(self, relations) -> "IntegrityBasis":
        return IntegrityBasis(self.rep, self.polys, self.degrees, tuple(relations))


def _support_size(p: Polynomial) -> int:
    used = set()
    for m in p.terms:
        for i, e in enumerate(m):
            if e:
                used.add(i)
    return len(used)


def compute_mib(rep: FiniteGroupRep, degree_cap: int | None = None) -> IntegrityBasis:
    """Minimal integrity basis up to ``degree_cap`` (default: group order).

    The default cap is sufficient for completeness; a user-lowered cap
    yields the degree-truncated answer.  At each degree the new generators
    are the reduced-echelon basis of the quotient (invariant space modulo
    products of lower generators), which pins the choice completely: the
    Z2 footnote basis comes out as (x^2, y^2, xy), the symmetric groups
    yield the elementary symmetric functions.  Within a degree, generators
    involving fewer coordinates are listed first, ties broken by leading
    monomial.
    """
    if degree_cap is None:
        degree_cap = rep.order
    series = molien_series(rep, degree_cap)
    polys: list[Polynomial] = []
    degrees: list[int] = []
    for d in range(1, degree_cap + 1):
        c_d = series.coefficient(d)
        if c_d == 0:
            continue
        monos, index = monomial_index(rep.dim, d)
        products = ra.RowReducer(len(monos))
        for expo in jmonomials_of_xdegree(degrees, d):
            prod = Polynomial.constant(rep.dim, 1)
            for i, e in enumerate(expo):
                if e:
                    prod = prod * polys[i] ** e
            products.add(coefficient_vector(prod, index))
        if products.rank > c_d:
            raise ArithmeticError("product span exceeds Molien count")
        if products.rank == c_d:
            continue
        quotient = ra.RowReducer(len(monos))
        raw_rows = []
        for m in monos:
            image = reynolds(rep, Polynomial.monomial(m, 1))
            if image.is_zero():
                continue
            residual = products.residual(coefficient_vector(image, index))
            if any(c != 0 for c in residual) and quotient.add(list(residual)):
                raw_rows.append(list(residual))
        reduced_rows, _ = ra.rref(raw_rows)
        if products.rank + len(reduced_rows) != c_d:
            raise CapTooLow(
                f"invariant space at degree {d} not exhausted (cap {degree_cap})"
            )
        new_polys = [
            Polynomial(
                rep.dim, {monos[i]: c for i, c in enumerate(row) if c != 0}
            ).monic()
            for row in reduced_rows
        ]
        new_polys.sort(key=lambda p: mono_key(p.leading_term()[0]), reverse=True)
        new_polys.sort(key=_support_size)
        for p in new_polys:
            polys.append(p)
            degrees.append(d)
    return IntegrityBasis(rep, tuple(polys), tuple(degrees))


# ------------------------------------------------------------------ relations


def find_relations(
    basis: IntegrityBasis, relation_degree_cap: int | None = None
) -> tuple[Polynomial, ...]:
    """Generators of the relation ideal among the basis, degree by degree.

    At each x-degree the exact kernel of the substitution map is computed;
    kernel vectors already inside the ideal generated by lower relations
    are dropped, the rest become new relation generators (monic in the
    canonical J-monomial order).
    """
    if relation_degree_cap is None:
        relation_degree_cap = 2 * basis.max_degree
    degrees = basis.degrees
    k = basis.k
    relations: list[Polynomial] = []
    rel_xdegrees: list[int] = []
    for xdeg in range(1, relation_degree_cap + 1):
        jmonos = jmonomials_of_xdegree(degrees, xdeg)
        if len(jmonos) < 2:
            continue
        jindex = {m: i for i, m in enumerate(jmonos)}
        xmonos, xindex = monomial_index(basis.rep.dim, xdeg)
        rows = [[Fraction(0)] * len(jmonos) for _ in xmonos]
        for col, expo in enumerate(jmonos):
            prod = Polynomial.constant(basis.rep.dim, 1)
            for i, e in enumerate(expo):
                if e:
                    prod = prod * basis.polys[i] ** e
            for m, c in prod.terms.items():
                rows[xindex[m]][col] = c
        kernel = ra.nullspace(rows, len(jmonos))
        if not kernel:
            continue
        ideal_span = ra.RowReducer(len(jmonos))
        for rel, rel_deg in zip(relations, rel_xdegrees):
            for q_expo in jmonomials_of_xdegree(degrees, xdeg - rel_deg):
                shifted = Polynomial.monomial(q_expo, 1, J_KIND) * rel
                vec = [Fraction(0)] * len(jmonos)
                for m, c in shifted.terms.items():
                    vec[jindex[m]] = c
                ideal_span.add(vec)
        for v in kernel:
            if ideal_span.add(v):
                rel_poly = Polynomial(
                    k, {jmonos[i]: c for i, c in enumerate(v) if c != 0}, J_KIND
                ).monic()
                relations.append(rel_poly)
                rel_xdegrees.append(xdeg)
    return tuple(relations)


def is_coregular(basis: IntegrityBasis) -> bool:
    """True when the basis generates freely (no relations up to default cap)."""
    relations = basis.relations
    if relations is None:
        relations = find_relations(basis)
    return len(relations) == 0


# ------------------------------------------------------- basis re-expression


def _check_invariant(rep: FiniteGroupRep, p: Polynomial):
    for e in rep.elements:
        if act(e.matrix, p) != p:
            raise NotInvariant("polynomial is moved by the group action")


def express_in_basis(
    rep: FiniteGroupRep, basis: IntegrityBasis, p: Polynomial
) -> Polynomial:
    """Exact Psi with Psi(J_1..J_k) == p, canonical representative.

    The linear solve walks J-monomial columns in canonical order with free
    unknowns pinned to zero, so the representative is unique even when the
    basis has relations.
    """
    _check_invariant(rep, p)
    result = Polynomial.zero(basis.k, J_KIND)
    for xdeg, part in p.homogeneous_parts().items():
        if xdeg == 0:
            result = result + Polynomial.constant(
                basis.k, part.terms[(0,) * rep.dim], J_KIND
            )
            continue
        jmonos = jmonomials_of_xdegree(basis.degrees, xdeg)
        if not jmonos:
            raise NotExpressible(f"no J-monomials at x-degree {xdeg}")
        xmonos, xindex = monomial_index(rep.dim, xdeg)
        columns = []
        for expo in jmonos:
            prod = Polynomial.constant(rep.dim, 1)
            for i, e in enumerate(expo):
                if e:
                    prod = prod * basis.polys[i] ** e
            columns.append(tuple(coefficient_vector(prod, xindex)))
        target = tuple(coefficient_vector(part, xindex))
        solution = ra.solve_canonical(columns, target)
        if solution is None:
            raise NotExpressible(f"degree-{xdeg} component outside the algebra")
        result = result + Polynomial(
            basis.k,
            {jmonos[i]: c for i, c in enumerate(solution) if c != 0},
            J_KIND,
        )
    return result


# ------------------------------------------------------------------ P-matrix


@dataclass(frozen=True)
class PMatrix:
    """Gradient Gram matrix of the basis, re-expressed in the basis.

    entries[i][h] is the J-space polynomial equal to
    sum_ab eta_inv[a][b] d_a J_i d_b J_h, where eta is the group-averaged
    metric; for orthogonal representations eta is the identity and this is
    the plain gradient inner product.
    """

    basis: IntegrityBasis
    entries: tuple[tuple[Polynomial, ...], ...]
    metric: InvariantMetric

    @property
    def k(self) -> int:
        return self.basis.k


def p_matrix(rep: FiniteGroupRep, basis: IntegrityBasis) -> PMatrix:
    metric = invariant_metric(rep)
    grads = [p.gradient() for p in basis.polys]
    k = basis.k
    n = rep.dim
    entries: list[list[Polynomial]] = [[None] * k for _ in range(k)]
    for i in range(k):
        for h in range(i, k):
            acc = Polynomial.zero(n)
            for a in range(n):
                for b in range(n):
                    w = metric.eta_inv[a][b]
                    if w != 0:
                        acc = acc + (grads[i][a] * grads[h][b]).scale(w)
            expr = express_in_basis(rep, basis, acc)
            entries[i][h] = expr
            entries[h][i] = expr
    return PMatrix(basis, tuple(tuple(row) for row in entries), metric)


def orbit_map(basis: IntegrityBasis, point) -> tuple:
    """Evaluate the basis at a point: exact for rational input, float for float."""
    if len(point) != basis.rep.dim:
        raise DimensionMismatch(
            f"point has {len(point)} coordinates, action has {basis.rep.dim}"
        )
    return tuple(p.evaluate(point) for p in basis.polys)
