"""SINR, eavesdropper capacity and secrecy-rate evaluation.

Two routes are provided for every MT quantity: closed forms in the
large-array regime (``closed_form_sinr`` and friends), and assembly from
Monte Carlo expectation estimates (``mt_sinr_from_stats``). Channel
statistics are always in small-scale units; path loss appears only as the
effective noise ``sigma2 / beta_k``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import check_config
from .errors import DomainError, SingularMatrixError
from .precoder import COND_LIMIT, Scheme


def rate(sinr):
    return np.log2(1.0 + np.asarray(sinr, dtype=float))


@dataclass(frozen=True)
class TermStats:
    """Monte Carlo estimates of the three SINR expectation terms for one MT.

    ``signal_amp`` estimates E|h_k^H F w_k|, ``interference`` the K-1 values
    E|h_k^H F w_l|^2 (l != k, in increasing l), ``an_leakage`` the AN power
    E[h_k^H A V V^H A^H h_k]. ``signal_power`` (E|h_k^H F w_k|^2) is kept for
    the variance term that the SINR expression neglects.
    """

    signal_amp: float
    interference: np.ndarray
    an_leakage: float
    signal_amp_stderr: float = 0.0
    interference_stderr: np.ndarray = None
    an_leakage_stderr: float = 0.0
    signal_power: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "interference", np.atleast_1d(np.asarray(self.interference, dtype=float)))
        if self.interference_stderr is None:
            object.__setattr__(self, "interference_stderr", np.zeros_like(self.interference))


def _weights(cfg, k):
    data = cfg.phi * cfg.P / cfg.K
    an = (1.0 - cfg.phi) * cfg.P / cfg.L3 if cfg.phi < 1.0 else 0.0
    return data, an, cfg.sigma2 / cfg.beta[k]


def mt_sinr_from_stats(stats, cfg, k):
    """SINR of MT ``k`` assembled from expectation estimates."""
    data, an, noise = _weights(cfg, k)
    num = data * stats.signal_amp ** 2
    den = data * float(np.sum(stats.interference)) + an * stats.an_leakage + noise
    if den <= 0.0:
        raise ValueError("zero SINR denominator (no interference, AN leakage or noise)")
    return num / den


def eve_sinr_all(pre, G_E, cfg):
    """Eavesdropper SINR against every MT's stream (noiseless Eve), shape (K,)."""
    if not cfg.phi < 1.0:
        raise DomainError("Eve SINR needs AN power (phi < 1)")
    M = G_E.shape[1]
    if pre.L3 < M:
        raise SingularMatrixError(float("inf"), f"Eve AN Gram (L3={pre.L3} < M={M})")
    b = G_E.conj().T @ pre.data_beam  # M x K
    c = G_E.conj().T @ pre.an_beam  # M x L3
    C = c @ c.conj().T
    cond = np.linalg.cond(C)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(cond, "Eve AN Gram")
    quad = np.real(np.sum(b.conj() * np.linalg.solve(C, b), axis=0))
    return pre.L3 * cfg.phi / (cfg.K * (1.0 - cfg.phi)) * quad


def eve_sinr(pre, G_E, cfg, k):
    return float(eve_sinr_all(pre, G_E, cfg)[k])


def closed_form_sinr(scheme, cfg, k):
    """Large-array SINR of MT ``k`` for ``scheme`` (table of closed forms)."""
    check_config(cfg)
    scheme = Scheme(scheme)
    lam = float(cfg.lam[k])
    N, K, L = cfg.N, cfg.K, cfg.L
    a = cfg.phi * cfg.P / K
    base = (1.0 - cfg.phi) * cfg.P * (1.0 - lam) + cfg.sigma2 / cfg.beta[k]
    if scheme is Scheme.ANA:
        num, den = a * (math.pi / 4 * lam * N), a * (K - 1) + base
    elif scheme is Scheme.HMF:
        num, den = a * (math.pi / 4 * lam * (N - 1) + L), a * 2 * (K - 1) + base
    elif scheme is Scheme.HZF:
        num, den = a * (math.pi / 4 * lam * (N - 1)), a * (K - 1) * (1 - lam) + base
    elif scheme is Scheme.FMF:
        num, den = a * lam * N, a * (K - 1) + base
    else:
        num, den = a * lam * (N - K), a * (K - 1) * (1 - lam) + base
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


def eve_capacity_bound(cfg):
    """Upper bound (bits/s/Hz) on Eve's ergodic capacity, valid for L - K > M."""
    if not cfg.L - cfg.K > cfg.M:
        raise DomainError(f"Eve bound needs L-K>M (L={cfg.L}, K={cfg.K}, M={cfg.M})")
    if not 0.0 < cfg.phi < 1.0:
        raise DomainError(f"Eve bound needs phi in (0,1), got {cfg.phi}")
    ratio = cfg.phi * cfg.M / (cfg.K * (1.0 - cfg.phi) * (1.0 - cfg.M / (cfg.L - cfg.K)))
    return math.log2(1.0 + ratio)


def secrecy_rate_bound(scheme, cfg, k):
    """Closed-form lower bound on the ergodic secrecy rate of MT ``k``."""
    return max(0.0, float(rate(closed_form_sinr(scheme, cfg, k))) - eve_capacity_bound(cfg))


@dataclass(frozen=True)
class OrderingReport:
    sinr: dict
    zf_chain: bool  # FZF > HZF > ANA
    mf_chain: bool  # FMF > ANA > HMF
    hzf_threshold: float
    hzf_above_threshold: bool
    hzf_beats_hmf: bool

    @property
    def threshold_consistent(self):
        return self.hzf_above_threshold == self.hzf_beats_hmf


def ordering_check(cfg, k=0):
    """Evaluate the five closed forms and report the claimed orderings.

    The orderings are asymptotic statements; outside ``N >> L, K`` they may
    fail and the report simply says so.
    """
    s = {sc.value: closed_form_sinr(sc, cfg, k) for sc in Scheme}
    lam = float(cfg.lam[k])
    thr = cfg.L / ((1 + lam) * (cfg.K - 1)) if cfg.K > 1 else math.inf
    return OrderingReport(
        sinr=s,
        zf_chain=s["FZF"] > s["HZF"] > s["ANA"],
        mf_chain=s["FMF"] > s["ANA"] > s["HMF"],
        hzf_threshold=thr,
        hzf_above_threshold=s["HZF"] > thr,
        hzf_beats_hmf=s["HZF"] > s["HMF"],
    )


@dataclass(frozen=True)
class RateReport:
    """Per-MT closed-form and Monte Carlo rates for one scheme and one phi.

    Array fields have one entry per MT. ``eve_bound`` is NaN (and the
    secrecy fields likewise) when the Eve bound is outside its domain.
    """

    scheme: Scheme
    phi: float
    sinr_cf: np.ndarray
    rate_cf: np.ndarray
    sinr_mc: np.ndarray
    rate_mc: np.ndarray
    rate_mc_stderr: np.ndarray
    eve_bound: float
    eve_mc: np.ndarray
    eve_mc_stderr: np.ndarray
    secrecy_cf: np.ndarray
    secrecy_mc: np.ndarray
    secrecy_mc_stderr: np.ndarray
