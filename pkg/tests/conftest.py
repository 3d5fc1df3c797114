"""Shared group fixtures.

All test groups are exact rational matrix groups.  Session scope keeps the
closure cost to one run per group.
"""

from fractions import Fraction

import pytest

from orbitscope import groups


def _frac_rows(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


REFLECT_LINE = _frac_rows([[-1]])
NEG_IDENTITY_2 = _frac_rows([[-1, 0], [0, -1]])
FLIP_X = _frac_rows([[-1, 0], [0, 1]])
FLIP_Y = _frac_rows([[1, 0], [0, -1]])
ROT90 = _frac_rows([[0, -1], [1, 0]])


@pytest.fixture(scope="session")
def z2_line():
    """{+1, -1} acting on the line."""
    return groups.close_generators([REFLECT_LINE], name="z2-line")


@pytest.fixture(scope="session")
def z2_plane():
    """{I, -I} on the plane."""
    return groups.close_generators([NEG_IDENTITY_2], name="z2-plane")


@pytest.fixture(scope="session")
def z2xz2():
    """Independent sign flips on the plane, order 4."""
    return groups.close_generators([FLIP_X, FLIP_Y], name="z2xz2")


@pytest.fixture(scope="session")
def z4():
    """Quarter-turn rotations, order 4."""
    return groups.close_generators([ROT90], name="z4")


@pytest.fixture(scope="session")
def d4():
    """Square symmetry group: quarter turn plus axis mirror, order 8."""
    return groups.close_generators([ROT90, FLIP_Y], name="d4")


def permutation_matrix(perm):
    n = len(perm)
    return tuple(
        tuple(Fraction(1) if perm[i] == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


@pytest.fixture(scope="session")
def s3_perm():
    """Permutation action of S3 on R^3."""
    swap = permutation_matrix((1, 0, 2))
    cycle = permutation_matrix((1, 2, 0))
    return groups.close_generators([swap, cycle], name="s3-perm")


@pytest.fixture(scope="session")
def s4_perm():
    """Permutation action of S4 on R^4."""
    swap = permutation_matrix((1, 0, 2, 3))
    cycle = permutation_matrix((1, 2, 3, 0))
    return groups.close_generators([swap, cycle], name="s4-perm")


CONJUGATOR = _frac_rows([[1, 1], [0, 2]])


@pytest.fixture(scope="session")
def d4_sheared():
    """D4 conjugated by a non-orthogonal rational matrix."""
    from orbitscope import rationals as ra

    s = CONJUGATOR
    s_inv = ra.mat_inverse(s)
    gens = [ra.mat_mul(ra.mat_mul(s_inv, g), s) for g in (ROT90, FLIP_Y)]
    return groups.close_generators(gens, name="d4-sheared")


# --------------------------------------------------------------- acceptance

ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status} - {detail}")
