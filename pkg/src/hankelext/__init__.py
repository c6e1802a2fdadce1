"""Symmetric tensor decomposition by Hankel moment-matrix extension."""

from __future__ import annotations

from .config import DEFAULT, Tolerances
from .errors import (
    AlgorithmicFailure,
    ArtifactError,
    Defective,
    DefectiveSpectrum,
    InputError,
    NotEnoughEquations,
    SingularPrincipalBlock,
    StructuralInfeasibility,
)
from .ffverify import DEFAULT_PRIME, ff_assemble, ff_rank, reproduce_table, verify_format
from .hankel import (
    MonomialBasis,
    binary_decompose,
    commuting_residuals,
    determinantal_residuals,
    extract_decomposition,
    find_basis,
    hankel,
    moment_variables,
    multiplication_matrices,
)
from .jennrich import jennrich_decompose, slices, solve_weights
from .linear import (
    assemble_linear_system,
    classify_equation,
    count_threshold,
    count_Y_E1,
    decompose4,
    solve_extension,
    tstar,
)
from .monomial import (
    MonomialSpec,
    canonical_params,
    monomial_basis,
    monomial_decompose,
    monomial_rank,
    parameter_set,
    torus_equivalent,
    vsp_dimension,
)
from .tensor import (
    Decomposition,
    SymTensor,
    apply_gl,
    catalecticant,
    essential_vars,
    hilbert_function,
    monomials_up_to,
    numerical_rank,
    reconstruction_residual,
    regularity,
    tensor_from_points,
    vandermonde,
)

__all__ = [
    "DEFAULT",
    "Tolerances",
    "AlgorithmicFailure",
    "ArtifactError",
    "Defective",
    "DefectiveSpectrum",
    "InputError",
    "NotEnoughEquations",
    "SingularPrincipalBlock",
    "StructuralInfeasibility",
    "DEFAULT_PRIME",
    "ff_assemble",
    "ff_rank",
    "reproduce_table",
    "verify_format",
    "MonomialBasis",
    "binary_decompose",
    "commuting_residuals",
    "determinantal_residuals",
    "extract_decomposition",
    "find_basis",
    "hankel",
    "moment_variables",
    "multiplication_matrices",
    "jennrich_decompose",
    "slices",
    "solve_weights",
    "assemble_linear_system",
    "classify_equation",
    "count_threshold",
    "count_Y_E1",
    "decompose4",
    "solve_extension",
    "tstar",
    "MonomialSpec",
    "canonical_params",
    "monomial_basis",
    "monomial_decompose",
    "monomial_rank",
    "parameter_set",
    "torus_equivalent",
    "vsp_dimension",
    "Decomposition",
    "SymTensor",
    "apply_gl",
    "catalecticant",
    "essential_vars",
    "hilbert_function",
    "monomials_up_to",
    "numerical_rank",
    "reconstruction_residual",
    "regularity",
    "tensor_from_points",
    "vandermonde",
]

__version__ = "0.1.0"
