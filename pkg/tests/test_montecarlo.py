import numpy as np
import pytest

from hybridsec.channel import SystemConfig
from hybridsec.errors import ConfigError
from hybridsec.montecarlo import EnsembleSpec, collect_trials, estimate_fluctuation_term, run_ensemble
from hybridsec.precoder import Scheme

REF = SystemConfig()


def _same(a, b):
    for name in ("signal", "cross", "leakage", "eve", "gamma"):
        np.testing.assert_array_equal(getattr(a.samples, name), getattr(b.samples, name))
    np.testing.assert_array_equal(a.rate_report.secrecy_mc, b.rate_report.secrecy_mc)


def test_single_trial_rerun_is_bit_identical():
    spec = EnsembleSpec(REF, Scheme.HZF, n_trials=1, master_seed=42)
    a, b = run_ensemble(spec), run_ensemble(spec)
    _same(a, b)
    assert np.all(np.isnan(a.rate_report.rate_mc_stderr))


@pytest.mark.parametrize("scheme", [Scheme.ANA, Scheme.FZF])
def test_worker_count_does_not_change_results(scheme):
    spec = EnsembleSpec(REF, scheme, n_trials=24, master_seed=9)
    _same(run_ensemble(spec, workers=1), run_ensemble(spec, workers=3))


def test_schemes_share_channel_draws():
    a = collect_trials(EnsembleSpec(REF, Scheme.FMF, 4, 3))
    b = collect_trials(EnsembleSpec(REF, Scheme.FZF, 4, 3))
    c = collect_trials(EnsembleSpec(REF, Scheme.FMF, 4, 4))
    assert not np.array_equal(a.signal, b.signal)
    assert not np.array_equal(a.eve, c.eve)


def test_hzf_mc_sinr_near_closed_form():
    res = run_ensemble(EnsembleSpec(REF, Scheme.HZF, n_trials=2000, master_seed=1))
    r = res.rate_report
    np.testing.assert_allclose(r.sinr_mc, r.sinr_cf, rtol=0.10)
    assert res.failures == 0 and not res.unreliable


def test_stderr_shrinks_with_trials():
    small = run_ensemble(EnsembleSpec(REF, Scheme.HMF, 200, 5)).rate_report
    large = run_ensemble(EnsembleSpec(REF, Scheme.HMF, 1800, 5)).rate_report
    ratio = small.secrecy_mc_stderr / large.secrecy_mc_stderr
    assert np.all((ratio > 2.0) & (ratio < 4.5))


def test_failed_trials_flag_unreliable():
    res = run_ensemble(EnsembleSpec(REF, Scheme.ANA, 40, 2, ins_max_iter=14))
    assert 0 < res.failures < 40 and res.unreliable
    assert set(res.failure_reasons) == {"ins_nonconvergence"}
    assert res.n_retained == 40 - res.failures


def test_all_trials_failing_is_an_error():
    with pytest.raises(RuntimeError, match="ins_nonconvergence"):
        run_ensemble(EnsembleSpec(REF, Scheme.ANA, 5, 2, ins_max_iter=2))


def test_eve_bound_config_error():
    with pytest.raises(ConfigError):
        run_ensemble(EnsembleSpec(REF.replace(L=8), Scheme.HZF, 2))
    res = run_ensemble(EnsembleSpec(REF.replace(L=8), Scheme.HZF, 2, eve=False))
    assert np.isnan(res.rate_report.eve_bound)


def test_fluctuation_term_decays_with_array_size():
    small = estimate_fluctuation_term(EnsembleSpec(REF.replace(N=64), Scheme.HMF, 1000, 6, eve=False))
    large = estimate_fluctuation_term(EnsembleSpec(REF.replace(N=256), Scheme.HMF, 1000, 6, eve=False))
    assert np.all(large < small)


def test_fluctuation_term_positive_for_analog():
    term = estimate_fluctuation_term(EnsembleSpec(REF.replace(N=256), Scheme.ANA, 500, 6, eve=False))
    assert np.all(term > 0) and np.all(term < 0.05)


def test_fluctuation_term_needs_two_trials():
    with pytest.raises(ValueError):
        estimate_fluctuation_term(EnsembleSpec(REF, Scheme.HMF, 1, 0))
