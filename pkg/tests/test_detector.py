import numpy as np
import pytest

from cpscan.detector import (
    TestConfig,
    binary_segmentation,
    min_test_length,
    run_detection,
    test_segment as run_test,
)
from cpscan.errors import DataError, ParameterError


@pytest.fixture
def cfg(cache_dir):
    return TestConfig(mc_reps=2000, cache_dir=str(cache_dir), min_seg=10)


def test_config_validation():
    for kw in (dict(alpha=0.0), dict(alpha=1.5), dict(min_seg=1), dict(mc_reps=10),
               dict(kappa=0.7), dict(beta=1.0), dict(p=0.5), dict(crit_grid=3),
               dict(kappa=0.5, alpha=1.0)):
        with pytest.raises(ParameterError):
            TestConfig(**kw)
    assert TestConfig(kappa=0.5, mc_reps=1).kappa == 0.5


def test_min_length():
    assert min_test_length(TestConfig(min_seg=2)) == 5
    assert min_test_length(TestConfig(min_seg=20)) == 40
    assert min_test_length(TestConfig(min_seg=2, kappa=0.5)) == 16


def test_constant_data_is_degenerate(cfg):
    res = run_test(np.full((40, 5), 3.0), cfg)
    assert res.degenerate and not res.reject and res.p_value == 1.0
    assert res.statistic_T == 0.0
    assert res.to_dict()["normalized"] is None


def test_too_short(cfg):
    with pytest.raises(DataError):
        run_test(np.random.default_rng(0).standard_normal((19, 3)), cfg)


def test_grid_membership_and_fields(cfg, rng):
    x = rng.standard_normal((60, 8))
    res = run_test(x, cfg)
    assert 2 <= res.k_hat <= 58
    assert res.eta_hat == res.k_hat / 60
    assert res.k_hat in (res.k_V, res.k_Z)
    assert res.driver in ("V", "Z")
    assert 1 / 2001 <= res.p_value <= 1
    assert res.reject == (res.p_value < cfg.alpha)


def test_location_shift_drives_z(cfg, rng):
    x = rng.standard_normal((80, 30))
    x[40:] += 1.0
    res, paths = run_test(x, cfg, return_paths=True)
    assert res.reject and res.driver == "Z"
    assert abs(res.k_hat - 40) <= 2
    assert res.which == "Z"


def test_scale_change_drives_v(cfg, rng):
    x = rng.standard_normal((80, 30))
    x[40:] *= 2.0
    res = run_test(x, cfg)
    assert res.reject and res.driver == "V"
    assert abs(res.k_hat - 40) <= 3


def test_deterministic(cfg, rng):
    x = rng.standard_normal((50, 6))
    assert run_test(x, cfg) == run_test(x, cfg)


def test_global_shift_invariance(cfg, rng):
    x = rng.integers(-100, 100, size=(90, 8)) / 16.0
    x[45:] += 1.5
    a = binary_segmentation(x, cfg)
    b = binary_segmentation(x + 3.25, cfg)
    assert a.breakpoints == b.breakpoints
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]


def test_darling_erdos_regime(rng):
    cfg = TestConfig(kappa=0.5, min_seg=10)
    x = rng.standard_normal((60, 10))
    x[30:] += 1.0
    res = run_test(x, cfg)
    assert res.reject and res.p_value < 0.05


def test_segmentation_two_changes(cfg, rng):
    x = rng.standard_normal((150, 20))
    x[50:100] += 1.5
    seg = binary_segmentation(x, cfg, keep_paths=True)
    assert len(seg.breakpoints) == 2
    assert abs(seg.breakpoints[0] - 50) <= 3 and abs(seg.breakpoints[1] - 100) <= 3
    assert sorted(seg.detection_order) == seg.breakpoints
    starts = [(r.start, r.stop) for r in seg.records]
    assert starts == sorted(starts)
    assert [(s, e) for s, e, _ in seg.paths] == starts
    for r in seg.records:
        assert r.stop - r.start >= min_test_length(cfg)


def test_segmentation_clamps_split(cfg):
    # a change right after the start must still leave min_seg on both sides
    rng = np.random.default_rng(1)
    x = rng.standard_normal((60, 20))
    x[:3] += 8.0
    seg = binary_segmentation(x, cfg)
    assert all(cfg.min_seg <= b <= 60 - cfg.min_seg for b in seg.breakpoints)


def test_segmentation_constant(cfg):
    seg = binary_segmentation(np.zeros((50, 2)), cfg)
    assert seg.breakpoints == [] and seg.records[0].degenerate


def test_segmentation_too_short(cfg):
    with pytest.raises(DataError):
        binary_segmentation(np.zeros((19, 2)), cfg)


def test_run_detection_single(cfg, rng):
    x = rng.standard_normal((80, 30))
    x[40:] += 1.0
    out = run_detection(x, cfg, segment=False, keep_paths=True)
    assert out.breakpoints == [out.records[0].k_hat]
    assert len(out.paths) == 1
    null = run_detection(np.full((30, 2), 1.0), cfg, segment=False)
    assert null.breakpoints == []
