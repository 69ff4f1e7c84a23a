import math

import numpy as np
import pytest

from cpscan.detector import TestConfig
from cpscan.errors import ParameterError
from cpscan.simgen import (
    SCENARIOS,
    ar1_rows,
    generate,
    multinomial_rows,
    poisson_inversion,
    run_experiment,
    run_power_experiment,
    run_size_experiment,
    scaled_t_rows,
    scenario,
)


def lag1(x):
    a, b = x[:, :-1].ravel(), x[:, 1:].ravel()
    return np.corrcoef(a, b)[0, 1]


def test_ar_phi_zero_is_iid():
    x = ar1_rows(10_000, 11, 0.0, np.random.default_rng(1))  # 10^5 coordinate pairs
    assert abs(lag1(x)) <= 0.01
    assert abs(x.var() - 1) <= 0.02


def test_ar_lag_correlation():
    x = ar1_rows(50_000, 21, 0.9, np.random.default_rng(2))  # 10^6 pairs
    assert abs(lag1(x) - 0.9) <= 0.01
    # stationary start: first and last coordinates share the same variance
    assert x[:, 0].var() == pytest.approx(x[:, -1].var(), rel=0.03)


def test_cov_change_post_variance():
    spec = scenario("ex5", 20_000, 50, eta=0.5)
    x, bps = generate(spec, np.random.default_rng(3))
    assert bps == [10_000]
    post = x[10_000:]
    assert post.var() == pytest.approx(1 / (1 - 0.55**2), rel=0.01)
    assert lag1(post) == pytest.approx(0.55, abs=0.01)
    assert lag1(x[:10_000]) == pytest.approx(0.5, abs=0.01)


def test_scaled_t_unit_variance():
    x = scaled_t_rows(10_000, 100, 7.0, np.random.default_rng(4))
    assert abs(x.var() - 1) <= 0.01


def test_multinomial_rows():
    x = multinomial_rows(500, 13, np.random.default_rng(5))
    assert np.all(x.sum(axis=1) == 65)
    p = 1 / np.arange(1, 14)
    np.testing.assert_allclose(x.mean(axis=0) / 65, p / p.sum(), atol=0.01)


def test_location_shift():
    spec = scenario("ex4", 4000, 30, mu=0.2, eta=0.25)
    x, bps = generate(spec, np.random.default_rng(6))
    assert bps == [1000]
    assert x[1000:].mean() - x[:1000].mean() == pytest.approx(0.2, abs=0.03)


def test_poisson_inversion_moments():
    rng = np.random.default_rng(7)
    draws = np.array([poisson_inversion(1.0, rng) for _ in range(50_000)])
    assert draws.mean() == pytest.approx(1.0, abs=0.02)
    assert draws.var() == pytest.approx(1.0, abs=0.03)
    assert np.mean(draws == 0) == pytest.approx(math.exp(-1), abs=0.01)


def test_switching_breakpoints():
    for r in range(0, 5):
        x, bps = generate(scenario("ex7", 300, 4, r_law=r), np.random.default_rng(0))
        assert bps == [math.floor(i * 300 / (r + 1)) for i in range(1, r + 1)]
        assert x.shape == (300, 4)


def test_switching_alternates():
    x, bps = generate(scenario("ex7", 6000, 20, r_law=2, mu=1.0), np.random.default_rng(8))
    a, b, c = x[:2000].mean(), x[2000:4000].mean(), x[4000:].mean()
    assert b - a == pytest.approx(1.0, abs=0.05)
    assert c == pytest.approx(a, abs=0.05)


@pytest.mark.parametrize("multi,single", [("ex7", "ex4"), ("ex8", "ex5"), ("ex9", "ex6")])
def test_switching_with_one_change_reduces_to_single(multi, single):
    a, ba = generate(scenario(multi, 101, 7, r_law=1, seed=9))
    b, bb = generate(scenario(single, 101, 7, eta=0.5, seed=9))
    assert ba == bb == [50]
    assert np.array_equal(a, b)


def test_reproducible():
    for name in SCENARIOS:
        a = generate(scenario(name, 40, 5, seed=11))
        b = generate(scenario(name, 40, 5, seed=11))
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]


@pytest.mark.parametrize("kw", [
    dict(phi=1.0), dict(phi_prime=-1.0), dict(nu=4.0), dict(eta=0.0), dict(eta=1.0),
    dict(r_law=-1), dict(r_law="geometric"),
])
def test_invalid_specs(kw):
    with pytest.raises(ParameterError):
        scenario("ex4", 50, 5, **kw)


def test_unknown_scenario():
    with pytest.raises(ParameterError):
        scenario("ex10", 50, 5)


def test_size_alpha_one_rejects_always(cache_dir):
    cfg = TestConfig(alpha=1.0, kappa=0.2, mc_reps=2000, cache_dir=str(cache_dir))
    rep = run_size_experiment(scenario("ex1", 40, 10, seed=3), cfg, 50)
    assert rep.rejection_rate == 1.0


def test_kind_checks(cache_dir):
    cfg = TestConfig(mc_reps=1000, cache_dir=str(cache_dir))
    with pytest.raises(ParameterError):
        run_size_experiment(scenario("ex4", 50, 5), cfg, 2)
    with pytest.raises(ParameterError):
        run_power_experiment(scenario("ex1", 50, 5), cfg, 2)


def test_experiment_reports_reproducible(cache_dir):
    cfg = TestConfig(kappa=0.4, mc_reps=2000, min_seg=10, cache_dir=str(cache_dir))
    spec = scenario("ex4", 60, 20, mu=0.6, seed=5)
    a = run_experiment(spec, cfg, 20).to_dict()
    b = run_experiment(spec, cfg, 20).to_dict()
    a.pop("runtime_seconds"), b.pop("runtime_seconds")
    assert a == b
    assert 0 <= a["rejection_rate"] <= 1
    assert len(a["details"]["abs_loc_err"]) == 20


def test_parallel_matches_serial(cache_dir):
    cfg = TestConfig(kappa=0.4, mc_reps=2000, min_seg=10, cache_dir=str(cache_dir))
    spec = scenario("ex8", 80, 10, seed=6)
    a = run_experiment(spec, cfg, 8).to_dict()
    b = run_experiment(spec, cfg, 8, threads=2).to_dict()
    for r in (a, b):
        r.pop("runtime_seconds"), r.pop("config")
    assert a == b


def test_zero_change_segmentation_mostly_trivial(cache_dir):
    cfg = TestConfig(kappa=0.4, mc_reps=10_000, cache_dir=str(cache_dir))
    rep = run_experiment(scenario("ex8", 100, 100, r_law=0, seed=12), cfg, 500)
    perfect = np.mean(np.asarray(rep.details["ARI"]) == 1.0)
    assert perfect >= 0.91
    assert rep.mean_RI <= 1.0
