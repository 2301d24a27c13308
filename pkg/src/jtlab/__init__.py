"""Numerical toolkit for finite-dimensional JB*-triples and best approximation.

Cartan factors, triple products and Peirce calculus live in :mod:`jtlab.factors`
and :mod:`jtlab.tripotents`; regular inverses and BP-quasi-invertibility in
:mod:`jtlab.regularity`; distance-to-subspace solvers in :mod:`jtlab.approximation`;
verification suites in :mod:`jtlab.experiments`.
"""

from .approximation import SolverConfig, Subspace, distance_to_subspace, uniqueness_probe
from .errors import (
    FactorMismatchError,
    InconsistencyError,
    JtlabError,
    NotInvertibleError,
    NotTripotentError,
    ValidationError,
)
from .factors import (
    Element,
    FactorDescriptor,
    L_operator,
    Q_operator,
    antisymmetric,
    bergmann,
    direct_sum,
    norm,
    parse_factor,
    rectangular,
    spin,
    symmetric,
    triple_product,
)
from .meb import Ball, min_enclosing_ball
from .regularity import bp_quasi_invertible, generalized_inverse
from .tripotents import Relation, is_tripotent, peirce, range_tripotent, rank, relation

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "Element",
    "FactorDescriptor",
    "FactorMismatchError",
    "InconsistencyError",
    "JtlabError",
    "L_operator",
    "NotInvertibleError",
    "NotTripotentError",
    "Q_operator",
    "Relation",
    "SolverConfig",
    "Subspace",
    "ValidationError",
    "antisymmetric",
    "bergmann",
    "bp_quasi_invertible",
    "direct_sum",
    "distance_to_subspace",
    "generalized_inverse",
    "is_tripotent",
    "min_enclosing_ball",
    "norm",
    "parse_factor",
    "peirce",
    "range_tripotent",
    "rank",
    "rectangular",
    "relation",
    "spin",
    "symmetric",
    "triple_product",
    "uniqueness_probe",
]
