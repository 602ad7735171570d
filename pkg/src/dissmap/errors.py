"""Exception hierarchy used across the package.

Separate classes per failure category so callers (and the CLI exit-code
mapping) can distinguish bad input shapes from violated matrix structure,
infeasible mapping problems, and numerical breakdowns.
"""


class DissmapError(Exception):
    """Base class for all package errors."""


class ShapeError(DissmapError):
    """Matrix dimensions are incompatible with the requested operation."""


class StructureError(DissmapError):
    """A structural property (Hermitian, skew, PSD, full rank, ...) fails
    beyond tolerance."""


class DefinitenessError(StructureError):
    """A matrix required to be positive (semi)definite is not."""


class FeasibilityError(DissmapError):
    """The mapping problem has no solution; carries per-condition diagnostics."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class ParameterError(DissmapError):
    """Family parameters violate the characterization constraints."""

    def __init__(self, msg, violations=None):
        super().__init__(msg)
        self.violations = violations or []


class FrequencyError(DissmapError):
    """The requested frequency sits (numerically) on the spectrum."""


class NumericError(DissmapError):
    """Non-finite input or decomposition failure."""


class NotApplicableError(DissmapError):
    """Operation requires an asymptotically stable system."""


class NoCandidateError(DissmapError):
    """No admissible vector was found in the search subspace."""
