# Location: src/latgauge/errors.py
"""Domain errors. Everything computational derives from LatgaugeError so the CLI
can map it to exit code 1."""


class LatgaugeError(RuntimeError):
    exit_code = 1


class ConfigError(LatgaugeError):
    pass


class NonRealResult(LatgaugeError):
    """Inverse DFT left an imaginary residue above tolerance."""


class KernelConsistencyError(LatgaugeError):
    """A freshly built kernel table failed its evenness/reality/zero-mode checks."""


class KernelCacheError(LatgaugeError):
    pass


class UnstableStep(LatgaugeError):
    """Leapfrog energy drifted by more than 1% of its initial value."""


class AnnihilatedState(LatgaugeError):
    """A ladder move dropped every branch of a matter superposition."""


class NotSeparable(LatgaugeError):
    """Matter/field parts still differ across spin branches at readout."""


class NotDensityMatrix(LatgaugeError):
    pass


class UsageError(LatgaugeError):
    exit_code = 2


class NonNeutralWarning(UserWarning):
    """Charge field has a nonzero zero-mode component; only the neutral part is solved."""
