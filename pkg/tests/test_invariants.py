"""Invariant-theory layer: Molien counts, integrity bases, relations, P-matrix.

The independent oracle here is brute force: the dimension of the degree-d
invariant space is the exact rank of the Reynolds images of all degree-d
monomials, computed by row reduction with no series arithmetic involved.
Frozen values below were produced by that oracle and cross-checked by hand.
"""

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from orbitscope import rationals as ra
from orbitscope.errors import DimensionMismatch, NotExpressible, NotInvariant
from orbitscope.groups import close_generators, invariant_metric, orbit
from orbitscope.invariants import (
    IntegrityBasis,
    compute_mib,
    express_in_basis,
    find_relations,
    invariant_space_basis,
    is_coregular,
    jmonomials_of_xdegree,
    molien_series,
    orbit_map,
    p_matrix,
)
from orbitscope.polynomials import (
    J_KIND,
    Polynomial,
    act,
    monomials_of_degree,
    reynolds,
    substitute,
)


def brute_force_invariant_dim(rep, d):
    """Oracle: rank of {Reynolds(m) : m degree-d monomial}, exact."""
    monos = monomials_of_degree(rep.dim, d)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for m in monos:
        img = reynolds(rep, Polynomial.monomial(m, 1))
        row = [Fraction(0)] * len(monos)
        for mm, c in img.terms.items():
            row[index[mm]] = c
        rows.append(row)
    reduced, _ = ra.rref(rows)
    return len(reduced)


def xpoly(nvars, terms):
    return Polynomial(nvars, {m: Fraction(c) for m, c in terms.items()})


def jpoly(k, terms):
    return Polynomial(k, {m: Fraction(c) for m, c in terms.items()}, J_KIND)


def elementary_symmetric(n, k):
    terms = {}
    for combo in itertools.combinations(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] = 1
        terms[tuple(e)] = 1
    return xpoly(n, terms)


def random_rational_point(rng, n):
    return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))


# ------------------------------------------------------------ Molien series


def test_molien_matches_bruteforce(z2_line, z2_plane, z2xz2, z4, d4, d4_sheared, s3_perm):
    for rep in (z2_line, z2_plane, z2xz2, z4, d4, d4_sheared, s3_perm):
        series = molien_series(rep, 8)
        for d in range(9):
            assert series.coefficient(d) == brute_force_invariant_dim(rep, d)


def test_molien_matches_bruteforce_s4(s4_perm):
    series = molien_series(s4_perm, 6)
    for d in range(7):
        assert series.coefficient(d) == brute_force_invariant_dim(s4_perm, d)


def test_molien_frozen_z2_plane(z2_plane):
    assert molien_series(z2_plane, 4).coefficients == (1, 0, 3, 0, 5)


def test_molien_frozen_d4(d4):
    assert molien_series(d4, 4).coefficients == (1, 0, 1, 0, 2)


def test_molien_trivial_group_counts_all_monomials():
    rep = close_generators([ra.mat_identity(3)], name="trivial3")
    series = molien_series(rep, 8)
    for d in range(9):
        assert series.coefficient(d) == math.comb(3 + d - 1, d)


def test_molien_basic_shape(z2_plane, z4, s3_perm):
    for rep in (z2_plane, z4, s3_perm):
        series = molien_series(rep, 6)
        assert series.coefficient(0) == 1
        assert all(c >= 0 for c in series.coefficients)


def test_molien_invariant_under_conjugation(d4, d4_sheared):
    # similar representations have equal graded dimensions
    assert molien_series(d4, 8).coefficients == molien_series(d4_sheared, 8).coefficients


# ------------------------------------------------- graded invariant spaces


def test_invariant_space_sizes_and_contents(z2_plane, z2xz2, z4, d4, s3_perm):
    for rep in (z2_plane, z2xz2, z4, d4, s3_perm):
        series = molien_series(rep, 6)
        for d in range(7):
            basis = invariant_space_basis(rep, d)
            assert len(basis) == series.coefficient(d)
            for p in basis:
                assert p.is_homogeneous() and (p.is_zero() or p.degree() == d)
                for g in rep.elements:
                    assert act(g, p) == p


def test_invariant_space_degree0(z4):
    assert invariant_space_basis(z4, 0) == [Polynomial.constant(2, 1)]


def test_invariant_space_z2_degree2_span(z2_plane):
    got = invariant_space_basis(z2_plane, 2)
    want = [xpoly(2, {(2, 0): 1}), xpoly(2, {(0, 2): 1}), xpoly(2, {(1, 1): 1})]
    monos = monomials_of_degree(2, 2)

    def row_space(polys):
        rows = [[p.terms.get(m, Fraction(0)) for m in monos] for p in polys]
        reduced, _ = ra.rref(rows)
        return reduced

    assert row_space(got) == row_space(want)


def test_invariant_space_d4_degree2(d4):
    assert invariant_space_basis(d4, 2) == [xpoly(2, {(2, 0): 1, (0, 2): 1})]


# ------------------------------------------------- minimal integrity basis


def test_mib_z2_plane_footnote_basis(z2_plane):
    basis = compute_mib(z2_plane)
    assert basis.degrees == (2, 2, 2)
    assert basis.polys == (
        xpoly(2, {(2, 0): 1}),
        xpoly(2, {(0, 2): 1}),
        xpoly(2, {(1, 1): 1}),
    )


def test_mib_d4(d4):
    basis = compute_mib(d4)
    assert basis.degrees == (2, 4)
    assert basis.polys == (
        xpoly(2, {(2, 0): 1, (0, 2): 1}),
        xpoly(2, {(2, 2): 1}),
    )


def test_mib_z4(z4):
    basis = compute_mib(z4)
    assert basis.degrees == (2, 4, 4)
    assert basis.polys == (
        xpoly(2, {(2, 0): 1, (0, 2): 1}),
        xpoly(2, {(3, 1): 1, (1, 3): -1}),
        xpoly(2, {(2, 2): 1}),
    )


def test_mib_z2xz2(z2xz2):
    basis = compute_mib(z2xz2)
    assert basis.degrees == (2, 2)
    assert basis.polys == (xpoly(2, {(2, 0): 1}), xpoly(2, {(0, 2): 1}))


def test_mib_z2_line(z2_line):
    basis = compute_mib(z2_line)
    assert basis.degrees == (2,)
    assert basis.polys == (xpoly(1, {(2,): 1}),)


def test_mib_s3_elementary_symmetric(s3_perm):
    basis = compute_mib(s3_perm)
    assert basis.degrees == (1, 2, 3)
    assert basis.polys == tuple(elementary_symmetric(3, k) for k in (1, 2, 3))


def test_mib_s4_elementary_symmetric(s4_perm):
    basis = compute_mib(s4_perm, degree_cap=6)
    assert basis.degrees == (1, 2, 3, 4)
    assert basis.polys == tuple(elementary_symmetric(4, k) for k in (1, 2, 3, 4))


def test_mib_sheared_rep(d4_sheared):
    basis = compute_mib(d4_sheared)
    assert basis.degrees == (2, 4)
    for p in basis.polys:
        for g in d4_sheared.elements:
            assert act(g, p) == p


def test_mib_elements_invariant_homogeneous(z2_plane, z4, d4, s3_perm):
    for rep in (z2_plane, z4, d4, s3_perm):
        basis = compute_mib(rep)
        assert basis.degrees == tuple(sorted(basis.degrees))
        for p, d in zip(basis.polys, basis.degrees):
            assert p.is_homogeneous() and p.degree() == d
            for g in rep.elements:
                assert act(g, p) == p


def test_mib_minimality(z2_plane, z4, d4):
    # no generator lies in the algebra spanned by the others up to its degree
    for rep in (z2_plane, z4, d4):
        basis = compute_mib(rep)
        for a in range(basis.k):
            others = [p for i, p in enumerate(basis.polys) if i != a]
            degs = [d for i, d in enumerate(basis.degrees) if i != a]
            d_a = basis.degrees[a]
            monos = monomials_of_degree(rep.dim, d_a)
            index = {m: i for i, m in enumerate(monos)}
            span = ra.RowReducer(len(monos))
            for expo in jmonomials_of_xdegree(degs, d_a):
                prod = Polynomial.constant(rep.dim, 1)
                for i, e in enumerate(expo):
                    if e:
                        prod = prod * others[i] ** e
                vec = [Fraction(0)] * len(monos)
                for m, c in prod.terms.items():
                    vec[index[m]] = c
                span.add(vec)
            target = [Fraction(0)] * len(monos)
            for m, c in basis.polys[a].terms.items():
                target[index[m]] = c
            assert not span.contains(target)


def test_hilbert_series_of_mib_matches_molien(z2_plane, z4, d4, s3_perm):
    # products of the basis exhaust every graded invariant space
    for rep in (z2_plane, z4, d4, s3_perm):
        basis = compute_mib(rep)
        series = molien_series(rep, 6)
        for d in range(1, 7):
            monos = monomials_of_degree(rep.dim, d)
            index = {m: i for i, m in enumerate(monos)}
            span = ra.RowReducer(len(monos))
            for expo in jmonomials_of_xdegree(basis.degrees, d):
                prod = Polynomial.constant(rep.dim, 1)
                for i, e in enumerate(expo):
                    if e:
                        prod = prod * basis.polys[i] ** e
                vec = [Fraction(0)] * len(monos)
                for m, c in prod.terms.items():
                    vec[index[m]] = c
                span.add(vec)
            assert span.rank == series.coefficient(d)


# ----------------------------------------------------------------- relations


def test_relations_z2_footnote(z2_plane):
    basis = compute_mib(z2_plane)
    rels = find_relations(basis)
    assert rels == (jpoly(3, {(1, 1, 0): 1, (0, 0, 2): -1}),)


def test_relations_d4_none(d4):
    basis = compute_mib(d4)
    assert find_relations(basis) == ()
    assert is_coregular(basis)


def test_relations_z4_frozen(z4):
    basis = compute_mib(z4)
    rels = find_relations(basis)
    assert len(rels) == 1
    rel = rels[0]
    assert rel == jpoly(3, {(2, 0, 1): 1, (0, 2, 0): -1, (0, 0, 2): -4})
    assert substitute(rel, basis.polys).is_zero()


def test_relations_substitute_to_zero(z2_plane, z4):
    for rep in (z2_plane, z4):
        basis = compute_mib(rep)
        for rel in find_relations(basis):
            assert substitute(rel, basis.polys).is_zero()


def test_relations_empty_for_free_actions(z2xz2, s3_perm, d4_sheared):
    for rep in (z2xz2, s3_perm, d4_sheared):
        basis = compute_mib(rep)
        assert find_relations(basis) == ()


def test_is_coregular_cases(z2_plane, z4, d4, z2xz2, s3_perm):
    assert not is_coregular(compute_mib(z2_plane))
    assert not is_coregular(compute_mib(z4))
    assert is_coregular(compute_mib(d4))
    assert is_coregular(compute_mib(z2xz2))
    assert is_coregular(compute_mib(s3_perm))
    trivial = close_generators([ra.mat_identity(1)], name="trivial1")
    assert is_coregular(compute_mib(trivial, degree_cap=4))


# ------------------------------------------------------- expression in basis


def test_express_power_on_line(z2_line):
    basis = compute_mib(z2_line)
    p = xpoly(1, {(4,): 1})
    assert express_in_basis(z2_line, basis, p) == jpoly(1, {(2,): 1})


def test_express_d4_quartic(d4):
    basis = compute_mib(d4)
    p = xpoly(2, {(4, 0): 1, (0, 4): 1})
    assert express_in_basis(d4, basis, p) == jpoly(2, {(2, 0): 1, (0, 1): -2})


def test_express_canonical_choice_under_relation(z2_plane):
    basis = compute_mib(z2_plane)
    p = xpoly(2, {(3, 1): 1})
    psi = express_in_basis(z2_plane, basis, p)
    assert psi == jpoly(3, {(1, 0, 1): 1})
    assert substitute(psi, basis.polys) == p


def test_express_inhomogeneous(z2_line):
    basis = compute_mib(z2_line)
    p = xpoly(1, {(0,): 3, (2,): 1, (4,): 1})
    assert express_in_basis(z2_line, basis, p) == jpoly(
        1, {(0,): 3, (1,): 1, (2,): 1}
    )


def test_express_rejects_noninvariant(z2_plane):
    basis = compute_mib(z2_plane)
    with pytest.raises(NotInvariant):
        express_in_basis(z2_plane, basis, xpoly(2, {(3, 0): 1}))


def test_express_incomplete_basis(d4):
    truncated = compute_mib(d4, degree_cap=2)
    assert truncated.degrees == (2,)
    with pytest.raises(NotExpressible):
        express_in_basis(d4, truncated, xpoly(2, {(4, 0): 1, (0, 4): 1}))


def test_express_roundtrip_random(z2_plane, z4, d4, s3_perm):
    rng = random.Random(7)
    for rep in (z2_plane, z4, d4, s3_perm):
        basis = compute_mib(rep)
        for _ in range(5):
            psi_terms = {}
            for _ in range(3):
                expo = tuple(rng.randint(0, 2) for _ in range(basis.k))
                psi_terms[expo] = Fraction(rng.randint(-5, 5))
            psi = Polynomial(basis.k, psi_terms, J_KIND)
            p = substitute(psi, basis.polys)
            back = express_in_basis(rep, basis, p)
            assert substitute(back, basis.polys) == p


# ------------------------------------------------------------------ P-matrix


def test_p_matrix_line(z2_line):
    basis = compute_mib(z2_line)
    pm = p_matrix(z2_line, basis)
    assert pm.entries == ((jpoly(1, {(1,): 4}),),)


def test_p_matrix_sign_flips(z2xz2):
    basis = compute_mib(z2xz2)
    pm = p_matrix(z2xz2, basis)
    zero = Polynomial.zero(2, J_KIND)
    assert pm.entries == (
        (jpoly(2, {(1, 0): 4}), zero),
        (zero, jpoly(2, {(0, 1): 4})),
    )


def test_p_matrix_d4(d4):
    basis = compute_mib(d4)
    pm = p_matrix(d4, basis)
    assert pm.entries[0][0] == jpoly(2, {(1, 0): 4})
    assert pm.entries[0][1] == jpoly(2, {(0, 1): 8})
    assert pm.entries[1][1] == jpoly(2, {(1, 1): 4})


def test_p_matrix_z2_plane(z2_plane):
    basis = compute_mib(z2_plane)
    pm = p_matrix(z2_plane, basis)
    assert pm.entries[0][0] == jpoly(3, {(1, 0, 0): 4})
    assert pm.entries[0][1].is_zero()
    assert pm.entries[0][2] == jpoly(3, {(0, 0, 1): 2})
    assert pm.entries[1][2] == jpoly(3, {(0, 0, 1): 2})
    assert pm.entries[2][2] == jpoly(3, {(1, 0, 0): 1, (0, 1, 0): 1})


def test_p_matrix_substitution_identity(z2_plane, z4, d4, s3_perm, d4_sheared):
    for rep in (z2_plane, z4, d4, s3_perm, d4_sheared):
        basis = compute_mib(rep)
        pm = p_matrix(rep, basis)
        metric = invariant_metric(rep)
        grads = [p.gradient() for p in basis.polys]
        for i in range(basis.k):
            for h in range(basis.k):
                assert pm.entries[i][h] == pm.entries[h][i]
                direct = Polynomial.zero(rep.dim)
                for a in range(rep.dim):
                    for b in range(rep.dim):
                        w = metric.eta_inv[a][b]
                        if w != 0:
                            direct = direct + (grads[i][a] * grads[h][b]).scale(w)
                assert substitute(pm.entries[i][h], basis.polys) == direct


def test_p_matrix_psd_at_points(z2_plane, z4, d4, s3_perm):
    rng = random.Random(11)
    for rep in (z2_plane, z4, d4, s3_perm):
        basis = compute_mib(rep)
        pm = p_matrix(rep, basis)
        for _ in range(100):
            x = [rng.uniform(-2, 2) for _ in range(rep.dim)]
            jvals = orbit_map(basis, x)
            num = np.array(
                [
                    [float(pm.entries[i][h].evaluate(jvals)) for h in range(basis.k)]
                    for i in range(basis.k)
                ]
            )
            assert np.linalg.eigvalsh(num).min() >= -1e-10


# ------------------------------------------------------------------ orbit map


def test_orbit_map_values(z2_plane):
    basis = compute_mib(z2_plane)
    assert orbit_map(basis, (1, 2)) == (1, 4, 2)
    assert orbit_map(basis, (-1, -2)) == (1, 4, 2)


def test_orbit_map_d4_vertex(d4):
    basis = compute_mib(d4)
    assert orbit_map(basis, (1, 0)) == (1, 0)
    assert orbit_map(basis, (0, -1)) == (1, 0)


def test_orbit_map_constant_on_orbits(z2_plane, z4, d4, s3_perm):
    rng = random.Random(3)
    for rep in (z2_plane, z4, d4, s3_perm):
        basis = compute_mib(rep)
        for _ in range(100):
            x = random_rational_point(rng, rep.dim)
            ref = orbit_map(basis, x)
            for y in orbit(rep, x):
                assert orbit_map(basis, y) == ref


def test_orbit_map_dimension_check(d4):
    basis = compute_mib(d4)
    with pytest.raises(DimensionMismatch):
        orbit_map(basis, (1, 2, 3))
