"""orbitscope: exact invariant-theory toolkit for finite matrix groups.

Layers, bottom up:

- ``rationals``   exact rational linear algebra
- ``polynomials`` sparse exact polynomials, group action, Reynolds average
- ``groups``      finite matrix groups, subgroups, fixed spaces
- ``invariants``  Molien series, minimal integrity bases, P-matrices
- ``strata``      isotropy classes, orbit-space strata, critical rays
- ``landau``      invariant potentials, minimization, phase diagrams
- ``reduction``   near-identity polynomial changes of coordinates
- ``dynamics``    equivariant descent flow and orbit-space projection
- ``cli``         deterministic command line front end
"""

__version__ = "0.1.0"

from .errors import OrbitscopeError
from .polynomials import Polynomial, parse_polynomial, act, reynolds
from .groups import (
    FiniteGroupRep,
    close_generators,
    load_group_file,
    all_subgroups,
    fixed_subspace,
    invariant_metric,
)
from .invariants import (
    MolienSeries,
    molien_series,
    IntegrityBasis,
    compute_mib,
    find_relations,
    express_in_basis,
    PMatrix,
    p_matrix,
    orbit_map,
)
from .strata import (
    SymmetryType,
    symmetry_types,
    stratum_of,
    isotropy_lattice,
    principal_stratum,
    principal_critical_orbits,
)
from .landau import (
    LandauModel,
    make_model,
    build_generic,
    check_stability,
    classify_symmetry,
    minimize,
    sweep,
    verify_critical_orbits,
)
from .reduction import (
    GradedPotential,
    poincare_generator,
    removable_terms,
    reduce,
    verify_reduction,
)
from .dynamics import (
    gradient_field,
    integrate,
    check_stratum_invariance,
    project_trajectory,
    orbit_space_consistency,
)

__all__ = [
    "OrbitscopeError",
    "Polynomial",
    "parse_polynomial",
    "act",
    "reynolds",
    "FiniteGroupRep",
    "close_generators",
    "load_group_file",
    "all_subgroups",
    "fixed_subspace",
    "invariant_metric",
    "MolienSeries",
    "molien_series",
    "IntegrityBasis",
    "compute_mib",
    "find_relations",
    "express_in_basis",
    "PMatrix",
    "p_matrix",
    "orbit_map",
    "SymmetryType",
    "symmetry_types",
    "stratum_of",
    "isotropy_lattice",
    "principal_stratum",
    "principal_critical_orbits",
    "LandauModel",
    "make_model",
    "build_generic",
    "check_stability",
    "classify_symmetry",
    "minimize",
    "sweep",
    "verify_critical_orbits",
    "GradedPotential",
    "poincare_generator",
    "removable_terms",
    "reduce",
    "verify_reduction",
    "gradient_field",
    "integrate",
    "check_stratum_invariance",
    "project_trajectory",
    "orbit_space_consistency",
]
