"""Exception hierarchy shared by all modules."""


class VerificationError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(VerificationError):
    """Operands structurally incompatible (dimension or algebra mismatch)."""


class ConfigurationError(VerificationError):
    """Unsupported type, case, or malformed configuration."""


class DomainError(VerificationError):
    """Input outside the mathematical domain of an operation."""


class SingularElementError(DomainError):
    """A regular element of the flat was required but a singular one was given."""


class DegeneracyError(VerificationError):
    """Joint eigenvalue clustering is ambiguous; indicates a construction bug."""


class UnsupportedCaseError(ConfigurationError):
    """Operation not defined for this catalog pair."""


class RankDeficiencyError(VerificationError):
    """A differential that must have full rank is rank-deficient."""


class IncompleteDataError(VerificationError):
    """Curated data required by the computation is missing."""


class NumericalConsistencyError(VerificationError):
    """A quantity that must be integral/exact deviated beyond tolerance."""
