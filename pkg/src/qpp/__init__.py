"""Constructive calculus for idempotents and quasi-projection pairs.

Finite-matrix implementations of matched/supplementary/range/null
projections, canonical block decompositions, idempotent reconstruction
formulas, quadratic-operator canonical forms, and the associated norm
identities, all verifiable by property tests.
"""

from .errors import (
    BadSpec,
    CrossCheckFailure,
    DegenerateSplit,
    DimensionMismatch,
    IllConditioned,
    InvariantViolation,
    IsProjection,
    NotHermitian,
    NotIdempotent,
    NotProjection,
    NotQuadratic,
    NotQuasiPair,
    NotSquareZero,
    QppError,
    SpectrumViolation,
    TrivialProjection,
)
from .linalg import (
    DEFAULT_TOL,
    CMatrix,
    FnKind,
    SubspaceBasis,
    Tolerances,
    as_cmatrix,
    func_calc,
    hermitian_eig,
    moore_penrose,
    operator_norm,
    polar_decomposition,
    range_basis,
    subspace_intersection,
    svd,
)

__all__ = [
    "BadSpec",
    "CMatrix",
    "CrossCheckFailure",
    "DEFAULT_TOL",
    "DegenerateSplit",
    "DimensionMismatch",
    "FnKind",
    "IllConditioned",
    "InvariantViolation",
    "IsProjection",
    "NotHermitian",
    "NotIdempotent",
    "NotProjection",
    "NotQuadratic",
    "NotQuasiPair",
    "NotSquareZero",
    "QppError",
    "SpectrumViolation",
    "SubspaceBasis",
    "Tolerances",
    "TrivialProjection",
    "as_cmatrix",
    "func_calc",
    "hermitian_eig",
    "moore_penrose",
    "operator_norm",
    "polar_decomposition",
    "range_basis",
    "subspace_intersection",
    "svd",
]
