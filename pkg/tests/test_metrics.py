import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridsec.channel import SystemConfig, generate_channels
from hybridsec.errors import DomainError
from hybridsec.metrics import (
    TermStats, closed_form_sinr, eve_capacity_bound, eve_sinr, eve_sinr_all, mt_sinr_from_stats,
    ordering_check, rate, secrecy_rate_bound,
)
from hybridsec.montecarlo import trial_streams
from hybridsec.precoder import PrecoderSet, Scheme, build_precoders

REF = SystemConfig(N=128, L=10, K=3, M=5, P=10.0, phi=0.5)


def test_analog_closed_form_value():
    assert closed_form_sinr(Scheme.ANA, REF, 0) == pytest.approx(125.66370614359172 / 5.583333333333333, rel=1e-12)
    # 22.508 is the hand evaluation from 125.664/5.583, rounded intermediates
    assert closed_form_sinr(Scheme.ANA, REF, 0) == pytest.approx(22.508, abs=2e-3)


def test_eve_bound_value():
    assert eve_capacity_bound(REF) == pytest.approx(math.log2(1 + 2.5 / (1.5 * 2 / 7)), rel=1e-14)
    assert eve_capacity_bound(REF) == pytest.approx(2.7726, abs=5e-5)


def test_secrecy_composition():
    assert secrecy_rate_bound(Scheme.ANA, REF, 0) == pytest.approx(1.7826, abs=5e-4)


@pytest.mark.parametrize("changes", [dict(L=8), dict(phi=1.0)])
def test_eve_bound_domain(changes):
    with pytest.raises(DomainError):
        eve_capacity_bound(REF.replace(**changes))


def test_eve_bound_limits():
    assert eve_capacity_bound(REF.replace(M=0)) == 0.0
    assert eve_capacity_bound(REF.replace(phi=1e-12)) < 1e-10


def test_secrecy_clamped_and_no_eve_limit():
    cfg = REF.replace(N=16, L=12, phi=0.95)
    assert float(rate(closed_form_sinr(Scheme.HMF, cfg, 0))) < eve_capacity_bound(cfg)
    assert secrecy_rate_bound(Scheme.HMF, cfg, 0) == 0.0
    cfg = REF.replace(M=0)
    assert secrecy_rate_bound(Scheme.HZF, cfg, 0) == pytest.approx(float(rate(closed_form_sinr(Scheme.HZF, cfg, 0))))


def test_perfect_csi_zf_is_noise_limited():
    cfg = REF.replace(p_tau=math.inf)
    a = cfg.phi * cfg.P / cfg.K
    assert closed_form_sinr(Scheme.HZF, cfg, 0) == pytest.approx(a * math.pi / 4 * 127 / 1.0)


def test_fzf_to_hzf_ratio_at_high_snr():
    cfg = REF.replace(N=4096, L=64, p_tau=math.inf, P=1e6)
    ratio = closed_form_sinr(Scheme.FZF, cfg, 0) / closed_form_sinr(Scheme.HZF, cfg, 0)
    assert ratio == pytest.approx(4 * (cfg.N - cfg.K) / (math.pi * (cfg.N - 1)), rel=1e-12)


def test_stats_reproduce_analog_row():
    lam = 0.75
    st_ = TermStats(math.sqrt(math.pi * REF.N * lam) / 2, [1.0, 1.0], REF.L3 * (1 - lam))
    assert mt_sinr_from_stats(st_, REF, 0) == pytest.approx(closed_form_sinr(Scheme.ANA, REF, 0), rel=1e-12)


def test_no_an_single_user():
    cfg = SystemConfig(K=1, L=4, phi=1.0, beta=(2.0,), sigma2=1.0)
    st_ = TermStats(3.0, [], 123.0)
    assert mt_sinr_from_stats(st_, cfg, 0) == pytest.approx(cfg.P * 9.0 / 0.5)


def test_zero_signal():
    assert mt_sinr_from_stats(TermStats(0.0, [1.0, 1.0], 1.0), REF, 0) == 0.0


def test_zero_denominator():
    with pytest.raises(ValueError):
        mt_sinr_from_stats(TermStats(1.0, [], 0.0), SystemConfig(K=1, L=4, phi=1.0, sigma2=0.0), 0)


def _draw(cfg, scheme, t=0):
    ch_rng, pre_rng = trial_streams(17, t)
    ch = generate_channels(cfg, ch_rng)
    return ch, build_precoders(scheme, ch.H_hat, cfg.L, pre_rng)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_eve_sinr_scale_invariant(scheme):
    ch, pre = _draw(REF, scheme)
    a = eve_sinr_all(pre, ch.G_E, REF)
    b = eve_sinr_all(pre, 3.7 * ch.G_E, REF)
    np.testing.assert_allclose(a, b, rtol=1e-10)
    assert eve_sinr(pre, ch.G_E, REF, 1) == a[1]


def test_eve_sinr_single_antenna_is_scalar_ratio():
    cfg = REF.replace(M=1)
    ch, pre = _draw(cfg, Scheme.HZF)
    g = ch.G_E[:, 0]
    num = abs(g.conj() @ pre.data_beam[:, 0]) ** 2
    den = np.sum(np.abs(g.conj() @ pre.an_beam) ** 2)
    expected = num * cfg.L3 * cfg.phi / (cfg.K * (1 - cfg.phi) * den)
    assert eve_sinr(pre, ch.G_E, cfg, 0) == pytest.approx(expected, rel=1e-10)


def test_eve_needs_an():
    ch, pre = _draw(REF, Scheme.HZF)
    with pytest.raises(DomainError):
        eve_sinr_all(pre, ch.G_E, REF.replace(phi=1.0))


def test_orderings_at_large_array():
    rep = ordering_check(REF.replace(N=512))
    assert rep.zf_chain and rep.mf_chain and rep.threshold_consistent


@settings(max_examples=200, deadline=None)
@given(st.integers(16, 1024), st.integers(1, 6), st.integers(1, 12), st.floats(0.01, 1.0),
       st.floats(0.01, 1e3), st.floats(0.01, 100.0), st.sampled_from(list(Scheme)))
def test_closed_forms_are_positive_and_monotone_in_power(N, K, extra, phi, P, p_tau, scheme):
    L = min(K + extra, N - 1)
    if L <= K:
        return
    cfg = SystemConfig(N=N, K=K, L=L, M=0, P=P, phi=phi, p_tau=p_tau)
    s = closed_form_sinr(scheme, cfg, 0)
    assert s > 0
    assert closed_form_sinr(scheme, cfg.replace(N=N + 64), 0) >= s


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 20), st.integers(0, 19), st.floats(0.01, 0.99))
def test_eve_bound_increasing_in_phi_and_antennas(K, L3, M, phi):
    if M >= L3:
        return
    cfg = SystemConfig(N=512, K=K, L=K + L3, M=M, phi=phi)
    c = eve_capacity_bound(cfg)
    assert c >= 0
    assert eve_capacity_bound(cfg.replace(phi=min(0.995, phi + 0.005))) >= c
    if M + 1 < L3:
        assert eve_capacity_bound(cfg.replace(M=M + 1)) > c
