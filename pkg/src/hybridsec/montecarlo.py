"""Monte Carlo ensemble engine.

Trial ``t`` draws its channel from stream ``(seed, t, 0)`` and its precoder
randomness from ``(seed, t, 1)``. Per-trial results are stored in trial
order and reduced once, so the outcome does not depend on the number of
workers, and two schemes run with the same seed see identical channels.
"""

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import check_config, generate_channels
from .errors import DomainError
from .metrics import (RateReport, TermStats, closed_form_sinr, eve_capacity_bound, eve_sinr_all,
                      mt_sinr_from_stats, rate)
from .numkernel import RngStream
from .precoder import INS_MAX_ITER, INS_TOL, Scheme, build_precoders

DEFAULT_TRIALS = 5000
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class EnsembleSpec:
    cfg: object
    scheme: Scheme
    n_trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    eve: bool = True
    ins_tol: float = INS_TOL
    ins_max_iter: int = INS_MAX_ITER

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")


@dataclass(frozen=True, eq=False)
class TrialSamples:
    """Per-trial records, trial-ordered. Rows of dropped trials hold NaN."""

    ok: np.ndarray  # (T,) bool
    reason: list  # (T,) str, '' for retained trials
    signal: np.ndarray  # (T, K) |h_k^H F w_k|
    cross: np.ndarray  # (T, K, K) |h_k^H F w_l|^2, diagonal unused
    leakage: np.ndarray  # (T, K)
    eve: np.ndarray  # (T, K) log2(1 + gamma_e); NaN when Eve is not evaluated
    gamma: np.ndarray  # (T,) data-precoder scaling factor, NaN for ANA


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    spec: EnsembleSpec
    stats: list
    eve_capacity_mc: np.ndarray
    eve_capacity_mc_stderr: np.ndarray
    rate_report: RateReport
    failures: int
    failure_reasons: dict
    samples: TrialSamples

    @property
    def n_retained(self):
        return int(np.sum(self.samples.ok))

    @property
    def unreliable(self):
        return self.failures > MAX_FAILURE_FRACTION * self.spec.n_trials

    @property
    def gamma_mean(self):
        return float(np.mean(self.samples.gamma[self.samples.ok]))


def trial_streams(master_seed, t):
    s = RngStream(master_seed, t)
    return s.child(0), s.child(1)


def _run_trial(spec, t):
    cfg = spec.cfg
    K = cfg.K
    ch_rng, pre_rng = trial_streams(spec.master_seed, t)
    ch = generate_channels(cfg, ch_rng)
    try:
        pre = build_precoders(spec.scheme, ch.H_hat, cfg.L, pre_rng, spec.ins_tol, spec.ins_max_iter)
    except np.linalg.LinAlgError:
        return None, "singular"
    if pre.ins is not None and not pre.ins.all_converged:
        return None, "ins_nonconvergence"
    X = ch.H.conj().T @ pre.data_beam
    Y = ch.H.conj().T @ pre.an_beam
    eve = np.full(K, np.nan)
    if spec.eve:
        try:
            eve = np.log2(1.0 + eve_sinr_all(pre, ch.G_E, cfg))
        except np.linalg.LinAlgError:
            return None, "eve_singular"
    signal = np.abs(np.diag(X))
    cross = np.abs(X) ** 2
    leakage = np.sum(np.abs(Y) ** 2, axis=1)
    if not (np.all(np.isfinite(signal)) and np.all(np.isfinite(cross)) and np.all(np.isfinite(leakage))):
        return None, "nonfinite"
    if spec.eve and not np.all(np.isfinite(eve)):
        return None, "nonfinite"
    rec = (signal, cross, leakage, eve, np.nan if pre.gamma is None else pre.gamma)
    return rec, ""


def _run_chunk(spec, start, stop):
    K = spec.cfg.K
    n = stop - start
    ok = np.zeros(n, dtype=bool)
    reason = [""] * n
    signal = np.full((n, K), np.nan)
    cross = np.full((n, K, K), np.nan)
    leakage = np.full((n, K), np.nan)
    eve = np.full((n, K), np.nan)
    gamma = np.full(n, np.nan)
    for i, t in enumerate(range(start, stop)):
        rec, why = _run_trial(spec, t)
        if rec is None:
            reason[i] = why
            continue
        ok[i] = True
        signal[i], cross[i], leakage[i], eve[i], gamma[i] = rec
    return ok, reason, signal, cross, leakage, eve, gamma


def _chunks(n, parts):
    edges = np.linspace(0, n, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def collect_trials(spec, workers=1):
    """Run every trial of ``spec`` and return trial-ordered samples."""
    if workers <= 1:
        parts = [_run_chunk(spec, 0, spec.n_trials)]
    else:
        bounds = _chunks(spec.n_trials, 4 * workers)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_chunk, [spec] * len(bounds), *zip(*bounds)))
    ok, reason, signal, cross, leakage, eve, gamma = zip(*parts)
    return TrialSamples(
        ok=np.concatenate(ok), reason=[r for rs in reason for r in rs],
        signal=np.concatenate(signal), cross=np.concatenate(cross),
        leakage=np.concatenate(leakage), eve=np.concatenate(eve), gamma=np.concatenate(gamma),
    )


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    m = np.mean(x, axis=0)
    if x.shape[0] < 2:
        return m, np.full_like(m, np.nan)
    return m, np.std(x, axis=0, ddof=1) / math.sqrt(x.shape[0])


def _term_stats(s, k):
    others = [l for l in range(s.signal.shape[1]) if l != k]
    sig, sig_se = _mean_se(s.signal[:, k])
    intf, intf_se = _mean_se(s.cross[:, k, others])
    leak, leak_se = _mean_se(s.leakage[:, k])
    return TermStats(float(sig), intf, float(leak), float(sig_se), intf_se, float(leak_se),
                     signal_power=float(np.mean(s.signal[:, k] ** 2)))


def _rate_stderr(s, stats, cfg, k, with_eve):
    """Delta-method standard error of rate_mc (and rate_mc - eve_mc) for MT ``k``."""
    n = s.signal.shape[0]
    if n < 2:
        return math.nan, math.nan
    others = [l for l in range(cfg.K) if l != k]
    cols = [s.signal[:, k][:, None], s.cross[:, k, others], s.leakage[:, k][:, None]]
    if with_eve:
        cols.append(s.eve[:, k][:, None])
    Y = np.hstack(cols)
    cov = np.atleast_2d(np.cov(Y, rowvar=False))
    a = cfg.phi * cfg.P / cfg.K
    b = (1.0 - cfg.phi) * cfg.P / cfg.L3 if cfg.phi < 1.0 else 0.0
    gam = mt_sinr_from_stats(stats, cfg, k)
    den = a * float(np.sum(stats.interference)) + b * stats.an_leakage + cfg.sigma2 / cfg.beta[k]
    g_sinr = np.concatenate([[2 * a * stats.signal_amp / den], np.full(len(others), -a * gam / den), [-b * gam / den]])
    g_rate = g_sinr / ((1.0 + gam) * math.log(2.0))
    cov_rate = cov[:-1, :-1] if with_eve else cov
    se_rate = math.sqrt(max(float(g_rate @ cov_rate @ g_rate), 0.0) / n)
    if not with_eve:
        return se_rate, math.nan
    g_sec = np.concatenate([g_rate, [-1.0]])
    return se_rate, math.sqrt(max(float(g_sec @ cov @ g_sec), 0.0) / n)


def reduce_samples(spec, samples):
    """Ordered, single-threaded reduction of per-trial samples into an EnsembleResult."""
    cfg = spec.cfg
    K = cfg.K
    kept = TrialSamples(
        ok=samples.ok[samples.ok], reason=[],
        signal=samples.signal[samples.ok], cross=samples.cross[samples.ok],
        leakage=samples.leakage[samples.ok], eve=samples.eve[samples.ok], gamma=samples.gamma[samples.ok],
    )
    failures = int(np.sum(~samples.ok))
    reasons = dict(Counter(r for r in samples.reason if r))
    if kept.signal.shape[0] == 0:
        raise RuntimeError(f"all {spec.n_trials} trials failed: {reasons}")
    stats = [_term_stats(kept, k) for k in range(K)]
    eve_mc, eve_se = _mean_se(kept.eve) if spec.eve else (np.full(K, np.nan), np.full(K, np.nan))
    try:
        bound = eve_capacity_bound(cfg)
    except DomainError:
        bound = math.nan
    sinr_cf = np.array([closed_form_sinr(spec.scheme, cfg, k) for k in range(K)])
    sinr_mc = np.array([mt_sinr_from_stats(stats[k], cfg, k) for k in range(K)])
    ses = [_rate_stderr(kept, stats[k], cfg, k, spec.eve) for k in range(K)]
    rate_cf, rate_mc = rate(sinr_cf), rate(sinr_mc)
    report = RateReport(
        scheme=spec.scheme, phi=cfg.phi,
        sinr_cf=sinr_cf, rate_cf=rate_cf, sinr_mc=sinr_mc, rate_mc=rate_mc,
        rate_mc_stderr=np.array([s[0] for s in ses]),
        eve_bound=bound, eve_mc=np.asarray(eve_mc), eve_mc_stderr=np.asarray(eve_se),
        secrecy_cf=np.maximum(rate_cf - bound, 0.0) if not math.isnan(bound) else np.full(K, np.nan),
        secrecy_mc=np.maximum(rate_mc - eve_mc, 0.0) if spec.eve else np.full(K, np.nan),
        secrecy_mc_stderr=np.array([s[1] for s in ses]),
    )
    return EnsembleResult(spec, stats, np.asarray(eve_mc), np.asarray(eve_se), report, failures, reasons, samples)


def run_ensemble(spec, workers=1):
    """Run ``spec.n_trials`` independent trials and assemble closed-form and MC rates."""
    check_config(spec.cfg, need_eve_bound=spec.eve)
    return reduce_samples(spec, collect_trials(spec, workers))


def estimate_fluctuation_term(spec, workers=1, result=None):
    """Normalized signal-amplitude variance per MT.

    Returns ``(E|x|^2 - E[|x|]^2) / E[|x|]^2`` with ``x = h_k^H F w_k``: the
    fluctuation term dropped from the SINR, relative to the useful signal
    power it is compared against. It should shrink as N grows.
    """
    if spec.n_trials < 2:
        raise ValueError("variance term needs at least 2 trials")
    if result is None:
        result = run_ensemble(spec, workers)
    return np.array([(st.signal_power - st.signal_amp ** 2) / st.signal_amp ** 2 for st in result.stats])
