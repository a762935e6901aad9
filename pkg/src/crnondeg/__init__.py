"""Exact finite-nondegeneracy analysis of polynomial CR maps between real submanifolds of C^N."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    Analysis,
    EkLadder,
    NondegeneracyReport,
    analyze,
    check_transformation_law,
    cr_basis,
    ek_spaces,
    gradient_pullback,
    manifold_nondegeneracy,
    transform_target,
)
from .jets import Jet, JetMatrix, VarSpace  # noqa: E402
from .manifolds import CRMap, ExtrinsicManifold, GraphManifold  # noqa: E402
from .parsing import parse  # noqa: E402
from .scalars import ComplexScalar, SurdScalar  # noqa: E402

__all__ = [
    "Analysis",
    "CRMap",
    "ComplexScalar",
    "EkLadder",
    "ExtrinsicManifold",
    "GraphManifold",
    "Jet",
    "JetMatrix",
    "NondegeneracyReport",
    "SurdScalar",
    "VarSpace",
    "analyze",
    "check_transformation_law",
    "cr_basis",
    "ek_spaces",
    "gradient_pullback",
    "manifold_nondegeneracy",
    "parse",
    "transform_target",
]
