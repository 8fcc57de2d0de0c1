"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class UltraGaborError(Exception):
    """Base class for all package errors."""


class BoundaryMaximum(UltraGaborError):
    """A supremum was attained at the edge of the search grid."""


class NotNormalized(UltraGaborError):
    """A weight function does not vanish on [0, 1]."""


class BudgetExhausted(UltraGaborError):
    """No candidate on the search ladder produced a witness."""


class TabulationTooShort(UltraGaborError):
    """A tabulated sequence does not reach far enough for the request."""


class PreconditionFailed(UltraGaborError):
    """A required condition could not be certified before the computation."""


class ZeroAtOrigin(UltraGaborError):
    """A window construction needs a function that is nonzero at 0."""


class InvalidLatticeParameter(UltraGaborError):
    """A lattice parameter lies outside the admissible range."""


class InvalidLattice(UltraGaborError):
    """The lattice density violates the requirement ab < 1."""


class TruncationTooTight(UltraGaborError):
    """An integrand is not negligible at the boundary of the quadrature box."""


class WindowsOrthogonal(UltraGaborError):
    """The analysis and synthesis windows have vanishing inner product."""


class NotConverged(UltraGaborError):
    """An iterative solver stopped before reaching its tolerance."""


class HypothesisNotCertified(UltraGaborError):
    """The hypotheses of an estimate could not be verified for the inputs."""


class ConfigError(UltraGaborError):
    """A configuration file is malformed or references unknown labels."""
