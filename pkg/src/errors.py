#!/usr/bin/env python3
"""
GREM Lab Errors

Exception hierarchy shared by every module. Validation errors (bad input,
unsupported region, budget overrun) map to CLI exit code 2; numeric failures
(non-convergence, undecidable winding) map to exit code 3.
"""


class GremError(Exception):
    """Base class for all laboratory errors"""
    exit_code = 1


class ValidationError(GremError):
    """Input or precondition rejected before any numerics ran"""
    exit_code = 2


class NumericFailure(GremError):
    """A numerical procedure could not produce a trustworthy answer"""
    exit_code = 3


class InvalidParameter(ValidationError):
    pass


class ConvexityViolation(ValidationError):
    """Critical temperatures sigma_k are not strictly increasing"""
    pass


class PhaseBoundary(ValidationError):
    """A normalizer was requested exactly on a phase boundary"""
    pass


class UnknownKind(ValidationError):
    pass


class UnknownLaw(ValidationError):
    pass


class DomainError(ValidationError):
    """Zeta argument outside the region where the requested mode is defined"""
    pass


class PoleProximity(ValidationError):
    pass


class GeometryError(ValidationError):
    """Point is not on the boundary curve the test was asked about"""
    pass


class DegenerateProfile(ValidationError):
    pass


class LeafBudgetExceeded(ValidationError):
    pass


class ModelFileError(ValidationError):
    pass


class NonConvergence(NumericFailure):
    pass


class BoundaryZero(NumericFailure):
    """Partition function vanishes on the contour even after jittering"""
    pass


class NonIntegerWinding(NumericFailure):
    pass


class ZeroValue(NumericFailure):
    """|Z_n| underflowed to zero in linear arithmetic"""
    pass
