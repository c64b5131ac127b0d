"""Ideals, homomorphisms and extensions of finite-dimensional Hilbert C*-modules.

Algebras are direct sums of matrix blocks and modules are direct sums of
rectangular blocks, so every construction reduces to exact block bookkeeping
checked against numerical linear algebra.
"""
from .core import (
    DEFAULT_TOL,
    HilbmodError,
    RankAmbiguityError,
    RefusalError,
    StructuralError,
    VerificationError,
)
from .fdcstar import BlockIdeal, FdAlgebra, classify_ideal, enumerate_ideals, quotient_algebra
from .hmod import HModule, product_span, range_ideal
from .ideals import classify, corollary_check, supplement_correspondences
from .linking import LinkingAlgebra, check_blockwise, extend_to_blockwise, is_ternary_hom
from .quotient import is_generalized_isometry, quotient_module
from .extensions import (
    ExactSequence,
    busby_trivial_witness,
    construct_splitting,
    diagonal_extensions,
    to_blockwise_extension,
    verify_short_exact,
)
from .probes import SearchConfig, hereditary_search, q1_search
from .scene import Scene, emit_scene, load_scene, parse_scene
from .subspace import LinearMap, Subspace

__version__ = "0.1.0"

__all__ = [
    "BlockIdeal",
    "DEFAULT_TOL",
    "ExactSequence",
    "FdAlgebra",
    "HModule",
    "HilbmodError",
    "LinearMap",
    "LinkingAlgebra",
    "RankAmbiguityError",
    "RefusalError",
    "Scene",
    "SearchConfig",
    "StructuralError",
    "Subspace",
    "VerificationError",
    "busby_trivial_witness",
    "check_blockwise",
    "classify",
    "classify_ideal",
    "construct_splitting",
    "corollary_check",
    "diagonal_extensions",
    "emit_scene",
    "enumerate_ideals",
    "extend_to_blockwise",
    "hereditary_search",
    "is_generalized_isometry",
    "is_ternary_hom",
    "load_scene",
    "parse_scene",
    "product_span",
    "q1_search",
    "quotient_algebra",
    "quotient_module",
    "range_ideal",
    "supplement_correspondences",
    "to_blockwise_extension",
    "verify_short_exact",
    "__version__",
]
