"""Exception hierarchy shared by all ccorder modules."""


class CcorderError(Exception):
    """Base class for every error raised by ccorder."""


class ConfigError(CcorderError, ValueError):
    """Invalid argument, rank choice, or scenario/experiment configuration."""


class ComputationError(CcorderError, ArithmeticError):
    """A numerical routine failed (SVD non-convergence, out-of-range result)."""


class SingularCovarianceError(ComputationError):
    """Sample covariance of one channel is too ill-conditioned to whiten."""

    def __init__(self, channel, cond):
        self.channel = channel
        self.cond = cond
        super().__init__(
            f"sample covariance of channel {channel!r} is singular "
            f"(condition number {cond:.3g})"
        )


class DegenerateStatisticError(ComputationError):
    """Bartlett-Lawley statistic undefined (zero correlation or sample size)."""
