"""Exception types shared across the package."""


class PtrsimError(Exception):
    """Base class for package-specific failures."""


class DimensionOverflowError(PtrsimError):
    """A requested basis, operator, or permanent is too large for desk scale."""


class TruncationLeakError(PtrsimError):
    """Probability leaked out of the truncated Fock space beyond tolerance."""


class SingularCavityError(PtrsimError):
    """A cavity feedback inverse is singular or hopelessly ill-conditioned."""


class CircuitFormatError(PtrsimError):
    """A circuit document failed validation; the message carries the field path."""
