"""Synthetic scenarios and size / power / segmentation experiments.

Scenarios ``ex1`` .. ``ex9``:

=====  ==================  ===================================================
name   kind                description
=====  ==================  ===================================================
ex1    gaussian_iid        rows i.i.d. N(0, I_d)
ex2    ar1                 each row an AR(1) path across coordinates, phi=0.9
ex3    multinomial         rows Multinomial(5d, p), p_i proportional to 1/i
ex4    loc_shift           AR(1) rows (phi=0.5); +mu on every coordinate after k1
ex5    cov_change          AR(1) rows, phi=0.5 -> phi'=0.55 after k1
ex6    tail_change         N(0, I_d) -> i.i.d. t(nu)/sqrt(nu/(nu-2)) after k1
ex7-9  multi_*             R ~ 1 + Poisson(1) changes at floor(i N / (R+1)),
                           alternating the two regimes of ex4-ex6
=====  ==================  ===================================================
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.signal import lfilter

from . import critvals
from .detector import TestConfig, binary_segmentation, test_segment
from .errors import ParameterError
from .metrics import adjusted_rand_index, breakpoints_to_labels, rand_index


class Kind(str, Enum):
    GAUSSIAN_IID = "gaussian_iid"
    AR1 = "ar1"
    MULTINOMIAL = "multinomial"
    LOC_SHIFT = "loc_shift"
    COV_CHANGE = "cov_change"
    TAIL_CHANGE = "tail_change"
    MULTI_LOC_SHIFT = "multi_loc_shift"
    MULTI_COV_CHANGE = "multi_cov_change"
    MULTI_TAIL_CHANGE = "multi_tail_change"


SCENARIOS = {
    "ex1": Kind.GAUSSIAN_IID,
    "ex2": Kind.AR1,
    "ex3": Kind.MULTINOMIAL,
    "ex4": Kind.LOC_SHIFT,
    "ex5": Kind.COV_CHANGE,
    "ex6": Kind.TAIL_CHANGE,
    "ex7": Kind.MULTI_LOC_SHIFT,
    "ex8": Kind.MULTI_COV_CHANGE,
    "ex9": Kind.MULTI_TAIL_CHANGE,
}

NULL_KINDS = {Kind.GAUSSIAN_IID, Kind.AR1, Kind.MULTINOMIAL}
SINGLE_KINDS = {Kind.LOC_SHIFT, Kind.COV_CHANGE, Kind.TAIL_CHANGE}
MULTI_KINDS = {Kind.MULTI_LOC_SHIFT, Kind.MULTI_COV_CHANGE, Kind.MULTI_TAIL_CHANGE}
_SINGLE_OF = {
    Kind.MULTI_LOC_SHIFT: Kind.LOC_SHIFT,
    Kind.MULTI_COV_CHANGE: Kind.COV_CHANGE,
    Kind.MULTI_TAIL_CHANGE: Kind.TAIL_CHANGE,
}


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation design.

    ``phi`` defaults to 0.9 for ``ar1`` and 0.5 for the change scenarios.
    ``eta`` is the break fraction of single-change designs. ``r_law`` is
    ``"poisson"`` for ``R ~ 1 + Poisson(1)`` or a fixed integer ``R``.
    """

    kind: Kind
    n: int
    d: int
    phi: float | None = None
    phi_prime: float = 0.55
    mu: float = 0.2
    nu: float = 7.0
    eta: float = 0.5
    r_law: str | int = "poisson"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n < 5 or self.d < 1:
            raise ParameterError(f"need n >= 5 and d >= 1, got n={self.n}, d={self.d}")
        if not abs(self.ar_phi) < 1 or not abs(self.phi_prime) < 1:
            raise ParameterError("AR coefficients must satisfy |phi| < 1")
        if not self.nu > 4:
            raise ParameterError(f"t degrees of freedom must exceed 4, got {self.nu}")
        if not 0 < self.eta < 1:
            raise ParameterError(f"break fraction must lie in (0, 1), got {self.eta}")
        if self.r_law != "poisson" and (not isinstance(self.r_law, int) or self.r_law < 0):
            raise ParameterError(f"r_law must be 'poisson' or a nonnegative int, got {self.r_law!r}")

    @property
    def ar_phi(self) -> float:
        if self.phi is not None:
            return self.phi
        return 0.9 if self.kind is Kind.AR1 else 0.5

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        out["phi"] = self.ar_phi
        return out


def scenario(name: str, n: int, d: int, **kwargs) -> ScenarioSpec:
    try:
        kind = SCENARIOS[name]
    except KeyError:
        raise ParameterError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return ScenarioSpec(kind=kind, n=n, d=d, **kwargs)


# -- generators ------------------------------------------------------------

def ar1_rows(rows: int, d: int, phi: float, rng: np.random.Generator) -> np.ndarray:
    """AR(1) paths across coordinates with a stationary first coordinate."""
    eps = rng.standard_normal((rows, d))
    eps[:, 0] /= math.sqrt(1.0 - phi * phi)
    return lfilter([1.0], [1.0, -phi], eps, axis=1)


def scaled_t_rows(rows: int, d: int, nu: float, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_t(nu, size=(rows, d)) / math.sqrt(nu / (nu - 2.0))


def multinomial_rows(rows: int, d: int, rng: np.random.Generator) -> np.ndarray:
    weights = 1.0 / np.arange(1, d + 1)
    return rng.multinomial(5 * d, weights / weights.sum(), size=rows).astype(np.float64)


def _regime_rows(kind: Kind, regime: int, rows: int, spec: ScenarioSpec,
                 rng: np.random.Generator) -> np.ndarray:
    d = spec.d
    if kind is Kind.GAUSSIAN_IID:
        return rng.standard_normal((rows, d))
    if kind is Kind.AR1:
        return ar1_rows(rows, d, spec.ar_phi, rng)
    if kind is Kind.MULTINOMIAL:
        return multinomial_rows(rows, d, rng)
    if kind is Kind.LOC_SHIFT:
        x = ar1_rows(rows, d, spec.ar_phi, rng)
        return x + spec.mu if regime else x
    if kind is Kind.COV_CHANGE:
        return ar1_rows(rows, d, spec.phi_prime if regime else spec.ar_phi, rng)
    if kind is Kind.TAIL_CHANGE:
        return scaled_t_rows(rows, d, spec.nu, rng) if regime else rng.standard_normal((rows, d))
    raise ParameterError(f"no single-regime generator for {kind}")


def poisson_inversion(lam: float, rng: np.random.Generator) -> int:
    """Poisson draw by sequential search of the CDF with one uniform."""
    u = rng.random()
    k, prob = 0, math.exp(-lam)
    cdf = prob
    while u > cdf:
        k += 1
        prob *= lam / k
        cdf += prob
        if prob == 0.0:
            break
    return k


def generate(spec: ScenarioSpec, rng: np.random.Generator | None = None):
    """Draw one data set; returns ``(X, true_breakpoints)``.

    Segments are generated in order from one stream, so a switching scenario
    with ``R = 1`` and ``eta = 1/2`` reproduces its single-change counterpart
    draw for draw.
    """
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    n = spec.n
    kind = spec.kind
    if kind in NULL_KINDS:
        return _regime_rows(kind, 0, n, spec, rng), []
    if kind in SINGLE_KINDS:
        bps = [int(math.floor(n * spec.eta))]
        base = kind
    else:
        r = 1 + poisson_inversion(1.0, rng) if spec.r_law == "poisson" else int(spec.r_law)
        bps = [int(math.floor(i * n / (r + 1))) for i in range(1, r + 1)]
        base = _SINGLE_OF[kind]
    bounds = [0] + bps + [n]
    blocks = [
        _regime_rows(base, j % 2, hi - lo, spec, rng)
        for j, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:]))
    ]
    return np.vstack(blocks), bps


# -- experiments -----------------------------------------------------------

@dataclass
class ExperimentReport:
    scenario: dict
    config: dict
    reps: int
    rejection_rate: float
    mean_err: float | None = None
    median_err: float | None = None
    mean_RI: float | None = None
    mean_ARI: float | None = None
    mean_abs_loc_err: float | None = None
    median_abs_loc_err: float | None = None
    runtime_seconds: float = 0.0
    quick: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def replication_rngs(seed: int, reps: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(reps)


def _one_test(args):
    spec, cfg, ss = args
    x, bps = generate(spec, np.random.default_rng(ss))
    res = test_segment(x, cfg)
    return res.reject, res.eta_hat, bps


def _one_segmentation(args):
    spec, cfg, ss = args
    x, bps = generate(spec, np.random.default_rng(ss))
    seg = binary_segmentation(x, cfg)
    return bps, seg.breakpoints


def _map(fn, jobs, threads: int):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [fn(j) for j in jobs]


def _prepare(cfg: TestConfig, n: int):
    # build the shared table once so worker processes only read the cache
    if cfg.kappa < 0.5:
        critvals.cache_lookup_or_build(cfg.crit_grid or n, cfg.kappa, cfg.mc_reps, cfg.seed, cfg.cache_dir,
                                       threads=cfg.threads)


def _worker_cfg(cfg: TestConfig, threads: int) -> TestConfig:
    return replace(cfg, threads=1) if threads > 1 else cfg


def run_size_experiment(spec: ScenarioSpec, cfg: TestConfig, reps: int,
                        threads: int = 1, quick: bool = False) -> ExperimentReport:
    """Rejection frequency under a no-change design."""
    if spec.kind not in NULL_KINDS:
        raise ParameterError(f"size experiments need a no-change scenario, got {spec.kind.value}")
    started = time.perf_counter()
    _prepare(cfg, spec.n)
    wcfg = _worker_cfg(cfg, threads)
    jobs = [(spec, wcfg, ss) for ss in replication_rngs(spec.seed, reps)]
    out = _map(_one_test, jobs, threads)
    rejections = np.array([r for r, _, _ in out], dtype=bool)
    return ExperimentReport(
        scenario=spec.to_dict(), config=cfg.to_dict(), reps=reps,
        rejection_rate=float(rejections.mean()),
        runtime_seconds=time.perf_counter() - started, quick=quick,
    )


def run_power_experiment(spec: ScenarioSpec, cfg: TestConfig, reps: int,
                         threads: int = 1, quick: bool = False) -> ExperimentReport:
    """Rejection frequency and location error under a single-change design."""
    if spec.kind in NULL_KINDS:
        raise ParameterError("power experiments need a scenario with a change")
    started = time.perf_counter()
    _prepare(cfg, spec.n)
    wcfg = _worker_cfg(cfg, threads)
    jobs = [(spec, wcfg, ss) for ss in replication_rngs(spec.seed, reps)]
    out = _map(_one_test, jobs, threads)
    rejections = np.array([r for r, _, _ in out], dtype=bool)
    report = ExperimentReport(
        scenario=spec.to_dict(), config=cfg.to_dict(), reps=reps,
        rejection_rate=float(rejections.mean()), quick=quick,
    )
    if spec.kind in SINGLE_KINDS:
        err = np.array([abs(eta - bps[0] / spec.n) for _, eta, bps in out])
        report.mean_abs_loc_err = float(err.mean())
        report.median_abs_loc_err = float(np.median(err))
        report.details["abs_loc_err"] = err.tolist()
        report.details["reject"] = rejections.tolist()
    report.runtime_seconds = time.perf_counter() - started
    return report


def run_segmentation_experiment(spec: ScenarioSpec, cfg: TestConfig, reps: int,
                                threads: int = 1, quick: bool = False) -> ExperimentReport:
    """Binary segmentation accuracy: count error and Rand indices against the truth."""
    started = time.perf_counter()
    _prepare(cfg, spec.n)
    wcfg = _worker_cfg(cfg, threads)
    jobs = [(spec, wcfg, ss) for ss in replication_rngs(spec.seed, reps)]
    out = _map(_one_segmentation, jobs, threads)
    errs, ri, ari = [], [], []
    for truth, found in out:
        errs.append(len(found) - len(truth))
        a = breakpoints_to_labels(truth, spec.n)
        b = breakpoints_to_labels(found, spec.n)
        ri.append(rand_index(a, b))
        ari.append(adjusted_rand_index(a, b))
    errs = np.array(errs)
    return ExperimentReport(
        scenario=spec.to_dict(), config=cfg.to_dict(), reps=reps,
        rejection_rate=float(np.mean([len(f) > 0 for _, f in out])),
        mean_err=float(errs.mean()),
        median_err=float(np.median(errs)),
        mean_RI=float(np.mean(ri)),
        mean_ARI=float(np.mean(ari)),
        runtime_seconds=time.perf_counter() - started,
        quick=quick,
        details={
            "R_true": [len(t) for t, _ in out],
            "R_hat": [len(f) for _, f in out],
            "ARI": ari,
        },
    )


def run_experiment(spec: ScenarioSpec, cfg: TestConfig, reps: int,
                   threads: int = 1, quick: bool = False) -> ExperimentReport:
    """Dispatch on the scenario: size for null designs, power for single
    changes, segmentation accuracy for switching designs."""
    if spec.kind in NULL_KINDS:
        return run_size_experiment(spec, cfg, reps, threads, quick)
    if spec.kind in SINGLE_KINDS:
        return run_power_experiment(spec, cfg, reps, threads, quick)
    return run_segmentation_experiment(spec, cfg, reps, threads, quick)


def default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))
