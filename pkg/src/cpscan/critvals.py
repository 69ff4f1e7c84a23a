"""Null critical values and p-values.

For ``kappa < 1/2`` the normalized statistic is compared with the law of
``max_k |B(k/n)| / (k/n (1 - k/n))^kappa`` over the same grid
``k = 2, ..., n-2`` that the statistic visits, where ``B`` is a standard
Brownian bridge. This law is simulated and cached on disk. For
``kappa = 1/2`` the Gumbel-type limit ``exp(-2 exp(-x))`` is used in closed
form.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ParameterError, TableMismatchError
from .ustat import Regime, WeightSpec, split_weights

log = logging.getLogger(__name__)

QUANTILE_LEVELS = (0.90, 0.95, 0.99, 0.995)
MIN_REPS = 1000
DEFAULT_REPS = 100_000
QUICK_REPS = 10_000
#: replications per RNG stream; streams are keyed by (seed, block index)
BLOCK_REPS = 1000
CACHE_ENV = "CPSCAN_CACHE"


@dataclass
class BridgeQuantileTable:
    """Empirical null law of the weighted bridge supremum on a grid of size ``n``."""

    n: int
    kappa: float
    reps: int
    seed: int
    quantiles: dict[float, float]
    samples: np.ndarray = field(repr=False)  # sorted ascending
    from_cache: bool = False

    def matches(self, n: int, kappa: float) -> bool:
        return self.n == n and math.isclose(self.kappa, kappa, abs_tol=1e-12)

    def exceedances(self, x: float) -> int:
        """Number of samples ``>= x``."""
        return int(self.samples.size - np.searchsorted(self.samples, x, side="left"))

    def threshold(self, alpha: float) -> float:
        """Critical value ``c`` with ``x > c`` iff ``p_value(x) < alpha``.

        ``p(x) = (1 + #{samples >= x}) / (1 + reps)`` is below ``alpha`` iff at
        most ``K`` samples reach ``x``, with ``K`` the largest integer strictly
        below ``alpha (1 + reps) - 1``; that holds iff ``x`` exceeds the
        ``(reps - K)``-th order statistic.
        """
        r = self.samples.size
        k = math.ceil(alpha * (1 + r) - 1) - 1
        if k < 0:
            return math.inf
        if k >= r:
            return -math.inf
        return float(self.samples[r - k - 1])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "reps": self.reps,
            "seed": self.seed,
            "quantiles": {f"{q:g}": v for q, v in self.quantiles.items()},
            "samples_digest": samples_digest(self.samples),
        }


def samples_digest(samples: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(samples, dtype="<f8").tobytes()).hexdigest()


def _check_bridge_args(n: int, kappa: float, reps: int) -> None:
    if n < 5:
        raise ParameterError(f"grid size must be >= 5, got {n}")
    if kappa >= 0.5:
        raise ParameterError("kappa >= 1/2 has no finite bridge limit; use the Gumbel path")
    if kappa < 0:
        raise ParameterError(f"kappa must be nonnegative, got {kappa}")
    if reps < MIN_REPS:
        raise ParameterError(f"need at least {MIN_REPS} replications, got {reps}")


def _simulate_block(n: int, kappa: float, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    steps = rng.standard_normal((size, n)) / math.sqrt(n)
    walk = np.cumsum(steps, axis=1)
    ks = np.arange(2, n - 1)
    t = ks / n
    bridge = walk[:, ks - 1] - t * walk[:, -1:]
    inv_w = split_weights(n, ks) ** (-kappa)
    return np.max(np.abs(bridge) * inv_w, axis=1)


def simulate_bridge_sup(
    n: int, kappa: float, reps: int = DEFAULT_REPS, seed: int = 0, threads: int = 1
) -> BridgeQuantileTable:
    """Monte-Carlo law of the weighted Brownian-bridge supremum on ``{k/n}``.

    Replications are grouped in blocks of ``BLOCK_REPS``, each block with its
    own stream derived from ``(seed, block)``. The sample multiset therefore
    does not depend on ``threads``.
    """
    _check_bridge_args(n, kappa, reps)
    sizes = [BLOCK_REPS] * (reps // BLOCK_REPS)
    if reps % BLOCK_REPS:
        sizes.append(reps % BLOCK_REPS)
    jobs = [(n, kappa, seed, b, s) for b, s in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: _simulate_block(*a), jobs))
    else:
        parts = [_simulate_block(*a) for a in jobs]
    samples = np.sort(np.concatenate(parts))
    quantiles = {q: float(np.quantile(samples, q)) for q in QUANTILE_LEVELS}
    return BridgeQuantileTable(
        n=n, kappa=float(kappa), reps=reps, seed=seed, quantiles=quantiles, samples=samples
    )


def gumbel_threshold(alpha: float) -> float:
    """Solve ``exp(-2 exp(-x)) = 1 - alpha`` for ``x``."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return -math.log(-math.log1p(-alpha) / 2.0)


def gumbel_p_value(x: float) -> float:
    return -math.expm1(-2.0 * math.exp(-x)) if x > -700 else 1.0


def p_value(normalized: float, w: WeightSpec, table: BridgeQuantileTable | None = None,
            n: int | None = None) -> float:
    """Upper-tail p-value of a normalized statistic.

    The bridge regime uses add-one smoothing, ``(1 + #{samples >= x}) / (1 + reps)``.
    Pass ``n`` to have the table checked against the segment length.
    """
    if w.regime is Regime.DARLING_ERDOS:
        return gumbel_p_value(normalized)
    if table is None:
        raise TableMismatchError("bridge regime needs a quantile table")
    if not math.isclose(table.kappa, w.kappa, abs_tol=1e-12) or (n is not None and table.n != n):
        raise TableMismatchError(
            f"table built for n={table.n}, kappa={table.kappa}; "
            f"asked for n={n}, kappa={w.kappa}"
        )
    return (1 + table.exceedances(normalized)) / (1 + table.samples.size)


# -- cache -----------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "cpscan"


def cache_paths(cache_dir: Path, n: int, kappa: float, reps: int, seed: int) -> tuple[Path, Path]:
    stem = f"bridge_n{n}_k{round(kappa * 1000)}_r{reps}_s{seed}"
    return cache_dir / f"{stem}.json", cache_dir / f"{stem}.f64"


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load(meta_path: Path, bin_path: Path, n: int, kappa: float, reps: int, seed: int):
    meta = json.loads(meta_path.read_text())
    samples = np.fromfile(bin_path, dtype="<f8")
    if (meta["n"], meta["reps"], meta["seed"]) != (n, reps, seed) or not math.isclose(
        meta["kappa"], kappa, abs_tol=1e-12
    ):
        raise ValueError("cache key mismatch")
    if samples.size != reps or samples_digest(samples) != meta["samples_digest"]:
        raise ValueError("sample file does not match its digest")
    quantiles = {float(q): float(v) for q, v in meta["quantiles"].items()}
    return BridgeQuantileTable(
        n=n, kappa=float(kappa), reps=reps, seed=seed, quantiles=quantiles,
        samples=samples.astype(np.float64), from_cache=True,
    )


_MEMORY: dict[tuple, BridgeQuantileTable] = {}


def cache_lookup_or_build(
    n: int,
    kappa: float,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    cache_dir: str | os.PathLike | None = None,
    threads: int = 1,
    memory: bool = True,
) -> BridgeQuantileTable:
    """Return the table for ``(n, kappa, reps, seed)``, simulating it only on a miss.

    Entries are written atomically, so concurrent builders of the same key
    cannot leave a torn file; the last writer wins with identical content.
    An unreadable entry is rebuilt with a warning.
    """
    _check_bridge_args(n, kappa, reps)
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    key = (str(cache_dir), n, float(kappa), reps, seed)
    if memory and key in _MEMORY:
        return replace(_MEMORY[key], from_cache=True)

    meta_path, bin_path = cache_paths(cache_dir, n, kappa, reps, seed)
    if meta_path.exists() or bin_path.exists():
        try:
            table = _load(meta_path, bin_path, n, kappa, reps, seed)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("rebuilding corrupt critical-value cache entry %s: %s", meta_path, exc)
        else:
            if memory:
                _MEMORY[key] = table
            return table

    table = simulate_bridge_sup(n, kappa, reps, seed, threads=threads)
    cache_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(bin_path, table.samples.astype("<f8").tobytes())
    _atomic_write(meta_path, json.dumps(table.to_dict(), indent=2).encode())
    if memory:
        _MEMORY[key] = table
    return table


def clear_memory_cache() -> None:
    _MEMORY.clear()
