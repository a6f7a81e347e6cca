"""Exception hierarchy.

Grouped so the CLI can map failures onto distinct exit codes:
configuration problems, numerical solver failures, and infeasible
calibration targets are reported separately.
"""


class StepCimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(StepCimError):
    """Bad configuration file, unknown key, or violated parameter invariant."""


class GeometryError(ConfigError):
    """Device geometry violates a structural requirement (e.g. nail >= hammer)."""


class DegenerateLoopError(ConfigError):
    """Hysteresis-loop constants describe a degenerate (zero-width) loop."""


class ResolutionError(StepCimError):
    """Time step too coarse for the requested transient integration."""


class BiasRangeError(StepCimError):
    """Applied bias outside the range an operation supports."""


class UnphysicalGapError(StepCimError):
    """Bandgap shift at least as large as the intrinsic gap."""


class InvalidStateError(StepCimError):
    """Cell holds a polarization pair that no ternary encoding produces."""


class CapacityError(StepCimError):
    """Vector longer than the number of simultaneously assertable rows."""


class SolverError(StepCimError):
    """Fixed-point / bisection solver failed to converge."""


class CalibrationInfeasibleError(StepCimError):
    """A calibration anchor cannot be reached; message names the binding constraint."""
