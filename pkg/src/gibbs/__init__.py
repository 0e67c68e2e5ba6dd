"""Gibbs manifolds, varieties, planes, and points of symmetric-matrix spaces.

The library computes with affine and linear spaces of symmetric matrices
L = A0 + span(A1..Ad): exact implicitization of the closure of exp(L)
(Groebner elimination, eigenvalue-relation detection, kernel certificates),
numerical implicitization through Vandermonde kernels, entropy-maximizing
Gibbs points of spectrahedra, entropic-regularization paths for semidefinite
programming, quantum optimal transport, and canonical pencils of quadrics.
"""

from .spectra import MatrixSpace, charpoly, sylvester_param, sym_eig, sym_exp, sym_log
from .ratpoly import MultiPoly, VarRing, parse_poly
from .groebner import Ideal, GroebnerBasis, BudgetExceededError, buchberger, contains, eliminate, normal_form, saturate
from .relations import EigenRelationSet, detect_relations, toric_ideal
from .implicit_sym import ImplicitResult, dimension_check, implicitize, implicitize_commuting, is_commuting
from .implicit_num import (
    KernelBasis,
    SampleSet,
    implicitize_numeric,
    kernel_of_degree,
    rationalize_vector,
    sample_manifold,
    verify_polynomial,
)
from .gibbs_solver import (
    GibbsPointResult,
    SdpInstance,
    entropic_path,
    frechet_exp,
    gibbs_point,
    project_to_gibbs_plane,
    von_neumann_entropy,
)
from .qot import QotShape, partial_trace, qot_gibbs_point, qot_image_membership, qot_space, segre_equations
from .pencils import SegreSymbol, banded_relations, block_det_constraints, canonical_pencil, dx_minors, parse_segre, x_ring

__version__ = "0.1.0"

__all__ = [
    "MatrixSpace",
    "charpoly",
    "sylvester_param",
    "sym_eig",
    "sym_exp",
    "sym_log",
    "MultiPoly",
    "VarRing",
    "parse_poly",
    "Ideal",
    "GroebnerBasis",
    "BudgetExceededError",
    "buchberger",
    "contains",
    "eliminate",
    "normal_form",
    "saturate",
    "EigenRelationSet",
    "detect_relations",
    "toric_ideal",
    "ImplicitResult",
    "dimension_check",
    "implicitize",
    "implicitize_commuting",
    "is_commuting",
    "KernelBasis",
    "SampleSet",
    "implicitize_numeric",
    "kernel_of_degree",
    "rationalize_vector",
    "sample_manifold",
    "verify_polynomial",
    "GibbsPointResult",
    "SdpInstance",
    "entropic_path",
    "frechet_exp",
    "gibbs_point",
    "project_to_gibbs_plane",
    "von_neumann_entropy",
    "QotShape",
    "partial_trace",
    "qot_gibbs_point",
    "qot_image_membership",
    "qot_space",
    "segre_equations",
    "SegreSymbol",
    "banded_relations",
    "block_det_constraints",
    "canonical_pencil",
    "dx_minors",
    "parse_segre",
    "x_ring",
    "__version__",
]
