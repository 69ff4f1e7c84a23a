"""U-statistic split processes V, Z, Z0 and the max-type statistic T.

For a split after observation ``k`` (1-based) the data are divided into a
left block ``1..k`` and a right block ``k+1..N``. Four distance averages are
tracked for every split:

* ``u1`` -- mean distance within the left block,
* ``u2`` -- mean distance within the right block,
* ``u3`` -- mean distance across the split,
* ``u4`` -- mean distance over all distinct pairs.

All of them come from three sums over the distance matrix that are updated
in O(N) per split, so the whole path costs O(N^2) once distances are known.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distances import MIN_OBSERVATIONS, DistanceMatrix, check_p, rescale_factor
from .errors import DataError, ParameterError


@dataclass(frozen=True)
class PrefixSums:
    """Within- and across-block distance sums for every split ``k = 0..N``.

    Arrays are indexed by ``k`` directly (length ``N + 1``):
    ``s1[k]`` sums pairs inside ``1..k``, ``s2[k]`` pairs inside ``k+1..N`` and
    ``s3[k]`` pairs straddling the split.
    """

    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    total: float

    @property
    def n(self) -> int:
        return self.s1.shape[0] - 1


def prefix_sums(dm: DistanceMatrix) -> PrefixSums:
    dist = dm.dist
    n = dist.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 observations, got {n}")
    # col[k] = sum_{i<k} dist[i, k]  (0-based), the distances from k back to earlier rows
    col = np.triu(dist, 1).sum(axis=0)
    # fwd[k] = sum_{j>k} dist[k, j], the distances from k forward to later rows
    fwd = np.triu(dist, 1).sum(axis=1)

    s1 = np.zeros(n + 1)
    s1[1:] = np.cumsum(col)
    s3 = np.zeros(n + 1)
    s3[1:] = np.cumsum(dm.row_sum - 2.0 * col)
    s2 = np.zeros(n + 1)
    # s2[k] = s2[k+1] + fwd[k] (0-based row k is observation k+1)
    s2[:n] = np.cumsum(fwd[::-1])[::-1]
    s2[n] = 0.0
    total = float(s1[n])
    return PrefixSums(s1=s1, s2=s2, s3=s3, total=total)


def split_weights(n: int, ks: np.ndarray) -> np.ndarray:
    """``t(1-t)`` at ``t = k/n``, evaluated symmetrically in ``k <-> n-k``."""
    return (ks * (n - ks)).astype(np.float64) / float(n * n)


@dataclass(frozen=True)
class ProcessPaths:
    """Discrete paths of V, Z and Z0 on the grid ``k = 2, ..., N-2``."""

    n: int
    d: int
    p: float
    beta: float
    ks: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    u4: float
    v: np.ndarray
    z: np.ndarray
    z0: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.ks / self.n

    def to_dict(self) -> dict:
        return {
            "ks": self.ks.tolist(),
            "v": self.v.tolist(),
            "z": self.z.tolist(),
            "z0": self.z0.tolist(),
            "u1": self.u1.tolist(),
            "u2": self.u2.tolist(),
            "u3": self.u3.tolist(),
            "u4": self.u4,
        }


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"beta must lie in [0, 1), got {beta}")
    return beta


def build_paths(ps: PrefixSums, d: int, p: float, beta: float) -> ProcessPaths:
    """Assemble V, Z and Z0 from prefix sums.

    ``u4`` is the mean over the ``N(N-1)/2`` distinct pairs, so that under a
    constant distribution ``u3 - u4`` has mean exactly zero.
    """
    beta = check_beta(beta)
    p = check_p(p)
    n = ps.n
    if n < 4:
        raise DataError(f"need at least 4 observations for a non-empty grid, got {n}")
    ks = np.arange(2, n - 1)
    nk = n - ks
    u1 = ps.s1[ks] / (ks * (ks - 1) / 2.0)
    u2 = ps.s2[ks] / (nk * (nk - 1) / 2.0)
    u3 = ps.s3[ks] / (ks * nk).astype(np.float64)
    u4 = ps.total / (n * (n - 1) / 2.0)

    scale = rescale_factor(d, p)
    tt = split_weights(n, ks)
    v = tt * scale * (u1 - u2)
    z0 = tt * scale * (u3 - u4)
    boost = (np.abs(n - 2 * ks) / n + n ** -0.5) ** (-beta)
    z = 2.0 * boost * z0
    return ProcessPaths(
        n=n, d=d, p=p, beta=beta, ks=ks,
        u1=u1, u2=u2, u3=u3, u4=u4, v=v, z=z, z0=z0,
    )


class Regime(str, Enum):
    INTEGRAL = "integral"
    DARLING_ERDOS = "darling_erdos"


@dataclass(frozen=True)
class WeightSpec:
    """Boundary weight ``w(t) = (t(1-t))^kappa``; the statistic divides by it.

    ``kappa < 1/2`` keeps the weighted bridge supremum finite; ``kappa = 1/2``
    is the self-normalized case with a Gumbel-type limit.
    """

    kappa: float

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 0.5:
            raise ParameterError(f"kappa must lie in [0, 1/2], got {self.kappa}")

    @property
    def regime(self) -> Regime:
        return Regime.DARLING_ERDOS if self.kappa == 0.5 else Regime.INTEGRAL

    def on_grid(self, n: int, ks: np.ndarray) -> np.ndarray:
        return split_weights(n, ks) ** self.kappa


def weight_value(w: WeightSpec, t: float) -> float:
    if not 0.0 < t < 1.0:
        raise ParameterError(f"weight argument must lie in (0, 1), got {t}")
    return (t * (1.0 - t)) ** w.kappa


@dataclass(frozen=True)
class Statistic:
    value: float
    k: int
    which: str  # "V" or "Z"


def statistic_T(paths: ProcessPaths, w: WeightSpec) -> Statistic:
    """Weighted supremum of ``max(|V|, |Z|)`` over the grid.

    Ties go to the smallest ``k``; at a single ``k``, V wins exact ties.
    """
    weights = w.on_grid(paths.n, paths.ks)
    av = np.abs(paths.v) / weights
    az = np.abs(paths.z) / weights
    use_v = av >= az
    both = np.where(use_v, av, az)
    i = int(np.argmax(both))
    return Statistic(
        value=float(both[i]),
        k=int(paths.ks[i]),
        which="V" if use_v[i] else "Z",
    )


def paths_from_distances(dm: DistanceMatrix, d: int, beta: float) -> ProcessPaths:
    if dm.n < MIN_OBSERVATIONS:
        raise DataError(f"need at least {MIN_OBSERVATIONS} observations, got {dm.n}")
    return build_paths(prefix_sums(dm), d=d, p=dm.p, beta=beta)
