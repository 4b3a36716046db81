"""System configuration and per-trial channel generation.

Channels are small-scale (unit variance); path loss enters the metrics only
through ``sigma2 / beta_k``. Channel estimation is modelled statistically:
the MMSE estimate and its error are independent Gaussians whose variances
split the unit channel power according to the estimation quality.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .numkernel import as_generator, sample_complex_gaussian


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def derive_lambda(p_tau, tau, beta_k):
    """MMSE estimation quality ``p*tau*beta / (1 + p*tau*beta)``.

    ``p_tau = inf`` gives perfect CSI (exactly 1).
    """
    if beta_k <= 0:
        raise ValueError(f"path loss must be positive, got {beta_k}")
    if p_tau < 0:
        raise ValueError(f"pilot power must be nonnegative, got {p_tau}")
    if tau < 1:
        raise ValueError(f"pilot length must be >= 1, got {tau}")
    x = p_tau * tau * beta_k
    if math.isinf(x):
        return 1.0
    return x / (1.0 + x)


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters, all powers linear.

    ``tau`` defaults to ``K`` and ``beta`` to all ones when left as ``None``.
    """

    N: int = 128
    L: int = 10
    K: int = 3
    M: int = 5
    P: float = 10.0
    phi: float = 0.5
    p_tau: float = 1.0
    tau: int = None
    sigma2: float = 1.0
    beta: tuple = None
    beta_eve: float = 1.0

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", self.K)
        if self.beta is None:
            object.__setattr__(self, "beta", (1.0,) * self.K)
        else:
            beta = tuple(float(b) for b in np.atleast_1d(self.beta))
            if len(beta) == 1 and self.K != 1:
                beta = beta * self.K
            object.__setattr__(self, "beta", beta)

    @classmethod
    def from_db(cls, P_dB=10.0, p_tau_dB=0.0, **kw):
        return cls(P=db_to_linear(P_dB), p_tau=db_to_linear(p_tau_dB), **kw)

    @property
    def L3(self):
        """AN stream count, fixed at ``L - K``."""
        return self.L - self.K

    @property
    def lam(self):
        return np.array([derive_lambda(self.p_tau, self.tau, b) for b in self.beta])

    def replace(self, **changes):
        return replace(self, **changes)


def validate_config(cfg, need_eve_bound=False):
    """Return the names of all violated invariants (empty list when valid)."""
    bad = []
    if not cfg.K < cfg.L:
        bad.append("K < L")
    if not cfg.L < cfg.N:
        bad.append("L < N")
    if cfg.K < 1:
        bad.append("K >= 1")
    if cfg.M < 0:
        bad.append("M >= 0")
    if not cfg.tau >= cfg.K:
        bad.append("tau >= K")
    if not 0.0 < cfg.phi <= 1.0:
        bad.append("phi in (0,1]")
    if cfg.P < 0 or cfg.p_tau < 0 or cfg.sigma2 < 0:
        bad.append("powers >= 0")
    if len(cfg.beta) != cfg.K:
        bad.append("len(beta) == K")
    if any(not b > 0 for b in cfg.beta) or not cfg.beta_eve > 0:
        bad.append("beta > 0")
    if need_eve_bound and not cfg.L - cfg.K > cfg.M:
        bad.append("L-K>M")
    return bad


def check_config(cfg, need_eve_bound=False):
    bad = validate_config(cfg, need_eve_bound)
    if bad:
        raise ConfigError(bad)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    H_hat: np.ndarray
    E: np.ndarray
    H: np.ndarray
    G_E: np.ndarray
    lam: np.ndarray = field(repr=False)


def generate_channels(cfg, rng):
    """Draw estimated channels, estimation errors and Eve's channel.

    Draw order is fixed (estimate, error, Eve) so a given stream always
    produces the same realization.
    """
    check_config(cfg)
    gen = as_generator(rng)
    lam = cfg.lam
    H_hat = sample_complex_gaussian(cfg.N, cfg.K, 1.0, gen) * np.sqrt(lam)
    E = sample_complex_gaussian(cfg.N, cfg.K, 1.0, gen) * np.sqrt(1.0 - lam)
    G_E = sample_complex_gaussian(cfg.N, cfg.M, cfg.beta_eve, gen)
    return ChannelRealization(H_hat=H_hat, E=E, H=H_hat + E, G_E=G_E, lam=lam)
