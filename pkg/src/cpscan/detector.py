"""Single-change test, change-point location estimate and binary segmentation."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import critvals
from .distances import DistanceMatrix, as_data_matrix, check_p, pairwise_distances
from .errors import DataError, ParameterError
from .jackknife import DARLING_ERDOS_MIN_N, jackknife_sigma, normalize
from .ustat import ProcessPaths, Regime, WeightSpec, check_beta, paths_from_distances, statistic_T

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestConfig:
    """Tuning parameters shared by every test in a run."""

    __test__ = False  # keep pytest from collecting this class

    p: float = 1.0
    beta: float = 0.9
    kappa: float = 0.4
    alpha: float = 0.05
    min_seg: int = 20
    mc_reps: int = critvals.DEFAULT_REPS
    seed: int = 0
    cache_dir: str | None = None
    threads: int = 1
    #: grid size for bridge critical values; None matches each segment's own grid,
    #: a large fixed value approximates the continuum supremum
    crit_grid: int | None = None

    def __post_init__(self):
        check_p(self.p)
        check_beta(self.beta)
        WeightSpec(self.kappa)
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.kappa == 0.5 and self.alpha >= 1.0:
            raise ParameterError("alpha must be < 1 for the Darling-Erdos regime")
        if self.min_seg < 2:
            raise ParameterError(f"min_seg must be >= 2, got {self.min_seg}")
        if self.crit_grid is not None and self.crit_grid < 5:
            raise ParameterError(f"crit_grid must be >= 5, got {self.crit_grid}")
        if self.kappa < 0.5 and self.mc_reps < critvals.MIN_REPS:
            raise ParameterError(f"mc_reps must be >= {critvals.MIN_REPS}, got {self.mc_reps}")

    @property
    def weight(self) -> WeightSpec:
        return WeightSpec(self.kappa)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TestResult:
    """Outcome of one test on one segment; positions are relative to the segment."""

    __test__ = False

    n: int
    statistic_T: float
    argmax_k: int
    which: str
    normalized: float
    threshold: float
    p_value: float
    reject: bool
    sigma_hat: float
    k_V: int
    k_Z: int
    t_V: float
    t_Z: float
    eta_hat: float
    k_hat: int
    driver: str
    degenerate: bool
    start: int = 0
    stop: int | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, val in out.items():
            if isinstance(val, float) and not math.isfinite(val):
                out[key] = None
        return out


def min_test_length(cfg: TestConfig) -> int:
    return max(5, 2 * cfg.min_seg, DARLING_ERDOS_MIN_N if cfg.kappa == 0.5 else 5)


def _locate(paths: ProcessPaths) -> tuple[int, int, int, str]:
    """Candidate splits from unweighted |V| and |Z0|; pick by comparing |V| with |Z|."""
    iv = int(np.argmax(np.abs(paths.v)))
    iz = int(np.argmax(np.abs(paths.z0)))
    k_v, k_z = int(paths.ks[iv]), int(paths.ks[iz])
    if abs(paths.v[iv]) >= abs(paths.z[iz]):
        return k_v, k_z, k_v, "V"
    return k_v, k_z, k_z, "Z"


def test_distances(dm: DistanceMatrix, d: int, cfg: TestConfig,
                   return_paths: bool = False):
    """Run the test on a precomputed distance matrix.

    Returns a :class:`TestResult`, or ``(TestResult, ProcessPaths)`` when
    ``return_paths`` is set.
    """
    n = dm.n
    if n < min_test_length(cfg):
        raise DataError(
            f"segment of length {n} is too short; need >= {min_test_length(cfg)} "
            f"(min_seg={cfg.min_seg})"
        )
    w = cfg.weight
    paths = paths_from_distances(dm, d=d, beta=cfg.beta)
    stat = statistic_T(paths, w)
    jk = jackknife_sigma(dm, d)
    k_v, k_z, k_hat, driver = _locate(paths)

    if jk.degenerate:
        normalized, threshold, pval, reject = math.nan, math.nan, 1.0, False
    else:
        normalized = normalize(stat.value, jk.sigma_hat, n, w)
        if w.regime is Regime.DARLING_ERDOS:
            threshold = critvals.gumbel_threshold(cfg.alpha)
            pval = critvals.p_value(normalized, w)
        else:
            grid = cfg.crit_grid or n
            table = critvals.cache_lookup_or_build(
                grid, cfg.kappa, cfg.mc_reps, cfg.seed, cfg.cache_dir, threads=cfg.threads
            )
            threshold = table.threshold(cfg.alpha)
            pval = critvals.p_value(normalized, w, table, n=grid)
        reject = bool(normalized > threshold)

    result = TestResult(
        n=n,
        statistic_T=stat.value,
        argmax_k=stat.k,
        which=stat.which,
        normalized=normalized,
        threshold=threshold,
        p_value=pval,
        reject=reject,
        sigma_hat=jk.sigma_hat,
        k_V=k_v,
        k_Z=k_z,
        t_V=k_v / n,
        t_Z=k_z / n,
        eta_hat=k_hat / n,
        k_hat=k_hat,
        driver=driver,
        degenerate=jk.degenerate,
        start=0,
        stop=n,
    )
    return (result, paths) if return_paths else result


def test_segment(data, cfg: TestConfig | None = None, return_paths: bool = False):
    """Test one data matrix for a single change in distribution."""
    cfg = cfg or TestConfig()
    x = as_data_matrix(data)
    dm = pairwise_distances(x, cfg.p)
    return test_distances(dm, x.shape[1], cfg, return_paths=return_paths)


@dataclass
class SegmentationResult:
    """Change points found by binary segmentation.

    ``breakpoints`` are global 1-based indices ``k``: a change occurs after
    observation ``k``. ``records`` holds one test per visited segment, sorted
    by segment start; ``detection_order`` lists breakpoints as they were found.
    """

    n: int
    breakpoints: list[int]
    records: list[TestResult] = field(default_factory=list)
    detection_order: list[int] = field(default_factory=list)
    paths: list[tuple[int, int, ProcessPaths]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "breakpoints": list(self.breakpoints),
            "detection_order": list(self.detection_order),
            "tests": [r.to_dict() for r in self.records],
        }


def binary_segmentation(data, cfg: TestConfig | None = None,
                        keep_paths: bool = False) -> SegmentationResult:
    """Recursively test, split at the estimated change and test both halves.

    A segment is not tested when shorter than ``2 * min_seg``; recursion stops
    on non-rejection or a degenerate (constant) segment. Each child is tested
    at the same level ``alpha`` with the critical value for its own length.
    Split points are clamped so both children keep at least ``min_seg``
    observations.
    """
    cfg = cfg or TestConfig()
    x = as_data_matrix(data)
    n, d = x.shape
    if n < 2 * cfg.min_seg:
        raise DataError(f"need N >= 2*min_seg = {2 * cfg.min_seg}, got {n}")
    full = pairwise_distances(x, cfg.p)
    result = SegmentationResult(n=n, breakpoints=[])
    stack = [(0, n)]
    while stack:
        start, stop = stack.pop()
        length = stop - start
        if length < min_test_length(cfg):
            continue
        dm = full if (start, stop) == (0, n) else full.submatrix(start, stop)
        rec, paths = test_distances(dm, d, cfg, return_paths=True)
        rec.start, rec.stop = start, stop
        result.records.append(rec)
        if keep_paths:
            result.paths.append((start, stop, paths))
        if rec.degenerate or not rec.reject:
            continue
        k = min(max(rec.k_hat, cfg.min_seg), length - cfg.min_seg)
        split = start + k
        result.detection_order.append(split)
        # push right first so the left child is examined next
        stack.append((split, stop))
        stack.append((start, split))
    result.breakpoints = sorted(result.detection_order)
    result.records.sort(key=lambda r: (r.start, r.stop))
    result.paths.sort(key=lambda item: (item[0], item[1]))
    return result


def run_detection(data, cfg: TestConfig | None = None, segment: bool = True,
                  keep_paths: bool = False) -> SegmentationResult:
    """Either full binary segmentation or one test; both return a segmentation."""
    cfg = cfg or TestConfig()
    if segment:
        return binary_segmentation(data, cfg, keep_paths=keep_paths)
    x = as_data_matrix(data)
    rec, paths = test_segment(x, cfg, return_paths=True)
    bps = [rec.k_hat] if rec.reject else []
    out = SegmentationResult(n=x.shape[0], breakpoints=bps, records=[rec], detection_order=list(bps))
    if keep_paths:
        out.paths.append((0, x.shape[0], paths))
    return out


# these are library entry points, not pytest tests
test_distances.__test__ = False
test_segment.__test__ = False
