"""Exact intrinsic-torsion and curvature analysis of invariant almost Hermitian structures."""

from .scalars import Scalar, ScalarError, parse_scalar, format_scalar
from .multilinear import Form, LieAlgebra, Tensor

__all__ = [
    "Scalar",
    "ScalarError",
    "parse_scalar",
    "format_scalar",
    "Form",
    "LieAlgebra",
    "Tensor",
]
