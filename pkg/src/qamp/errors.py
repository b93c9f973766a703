"""Exception types shared across the package."""


class QampError(Exception):
    """Base class for all package-specific errors."""


class NormDriftError(QampError):
    """Statevector norm drifted beyond tolerance; never silently renormalized."""


class GateUnitarityError(QampError):
    """A gate matrix failed the unitarity check at construction."""


class PermutationError(QampError):
    """A basis-index map is not a bijection."""


class DegenerateSearchError(QampError):
    """Search or counting instance with an empty or universal marked set."""


class DistributionError(QampError):
    """Probability weights are negative or do not sum to one."""


class PayoffRangeError(QampError):
    """Payoff values violate the declared range contract."""


class ModelAssumptionError(QampError):
    """A declared model assumption (e.g. a second-moment bound) is violated."""


class ConfigError(QampError):
    """Malformed configuration input (CLI config file or parameter bundle)."""
