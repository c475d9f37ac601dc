"""Exception types shared across the package."""


class MldnnError(Exception):
    """Base for all domain errors (CLI maps these to exit code 1)."""


class ShapeError(MldnnError, ValueError):
    """Operands have incompatible shapes."""


class ConfigError(MldnnError, ValueError):
    """Invalid hyperparameter or run configuration."""


class SpecError(MldnnError, ValueError):
    """Architecture text failed to parse or validate."""


class DatasetError(MldnnError, ValueError):
    """CSV loading or dataset partitioning problem."""


class MetricError(MldnnError, ValueError):
    """A metric is undefined for the given inputs."""


class CheckpointError(MldnnError, ValueError):
    """Checkpoint file is malformed or incompatible."""


class GraphStateError(MldnnError, RuntimeError):
    """Graph operations called in an invalid order."""


class FitError(MldnnError, ValueError):
    """Closed-form regression fit failed."""
