"""Exception hierarchy.

The CLI maps these onto process exit codes: configuration and validation
problems exit 1, numerical failures exit 2, I/O and file-corruption
problems exit 3.
"""


class AntFdtdError(Exception):
    """Base class for all package errors."""


class ConfigurationError(AntFdtdError):
    """Invalid run configuration (bad indices, schema violations, ...)."""


class GridError(ConfigurationError):
    """Invalid grid geometry (non-positive cell size, too few cells)."""


class BuildError(ConfigurationError):
    """Antenna geometry cannot be built (containment violated, degenerate arm)."""


class RasterizationError(ConfigurationError):
    """Geometry cannot be mapped onto the requested grid (e.g. feed gap collapses)."""


class CoverageError(ConfigurationError):
    """A spectrum does not cover the requested frequency range."""


class NumericalError(AntFdtdError):
    """Base class for numerical failures (exit code 2)."""


class InstabilityError(NumericalError):
    """A field component became non-finite or exceeded the blow-up bound."""

    def __init__(self, step: int, detail: str = ""):
        self.step = step
        msg = f"field instability detected at step {step}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DivergenceError(NumericalError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training diverged (non-finite loss) at epoch {epoch}")


class RankDeficiencyError(NumericalError):
    """Normal equations are singular; advise a positive ridge penalty."""


class DataError(AntFdtdError):
    """Base class for dataset I/O failures (exit code 3)."""


class CorruptionError(DataError):
    """Dataset file failed its CRC or structural checks."""
