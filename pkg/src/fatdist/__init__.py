"""Pointwise linear algebra of fat distributions.

Submodules
----------
core     tolerance-aware subspace arithmetic
fat2     corank-2 fat tuples and degree-2 constructions
qcont    quaternionic contact pointwise models
frames   randomized builders and an independent verifier for regular frames
models   affine coframe models, exact brackets and Liouville lifts
jets     triangular solver for symmetric jet tensors
suites   seeded property suites
instances JSON instance files and their schema
cli      the ``fatdist`` command line front end
"""
from . import errors
from .core import DEFAULT_TOL, Subspace, Tolerance
from .errors import (
    ConstructionFailure, DimensionMismatchError, FatDistError, InternalInconsistencyError,
    InvalidFormError, NoRoomError, NotRegularError, NumericFailure, PreconditionError,
    SchemaError, SizeError,
)
from .report import Check, Report

__all__ = ["DEFAULT_TOL", "Subspace", "Tolerance", "Check", "Report", "errors",
           "ConstructionFailure", "DimensionMismatchError", "FatDistError",
           "InternalInconsistencyError", "InvalidFormError", "NoRoomError", "NotRegularError",
           "NumericFailure", "PreconditionError", "SchemaError", "SizeError"]

__version__ = "0.1.0"
