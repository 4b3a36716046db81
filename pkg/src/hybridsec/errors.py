"""Exception types raised by the simulator."""

import numpy as np


class ConfigError(ValueError):
    """Invalid system or experiment configuration.

    ``violations`` holds the names of every violated invariant.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))


class DomainError(ValueError):
    """A closed-form expression was evaluated outside its domain."""


class RankDeficiencyError(np.linalg.LinAlgError):
    def __init__(self, rank, required):
        self.rank = int(rank)
        self.required = int(required)
        super().__init__(f"rank deficient: detected rank {self.rank}, need {self.required}")


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, cond, what="matrix"):
        self.cond = float(cond)
        super().__init__(f"singular {what} (condition estimate {self.cond:.3e})")
