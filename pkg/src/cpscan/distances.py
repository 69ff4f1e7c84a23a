"""Pairwise L_p distances between observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DataError, ParameterError

MIN_OBSERVATIONS = 5


def as_data_matrix(values, min_n: int = MIN_OBSERVATIONS) -> np.ndarray:
    """Validate and return an ``(N, d)`` float64 observation matrix.

    One-dimensional input is treated as ``N`` scalar observations.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DataError(f"expected a 2-d array of observations, got ndim={x.ndim}")
    if x.shape[0] < min_n:
        raise DataError(f"need at least {min_n} observations, got {x.shape[0]}")
    if x.shape[1] < 1:
        raise DataError("observations must have at least one coordinate")
    bad = ~np.isfinite(x)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise DataError(
            f"non-finite value {x[row, col]!r} at row {row}, column {col}"
        )
    return x


def check_p(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or p < 1:
        raise ParameterError(f"norm order p must be a finite real >= 1, got {p}")
    return p


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of L_p distances with cached row sums.

    Attributes
    ----------
    dist : np.ndarray
        ``(N, N)`` array, zero diagonal, exactly symmetric.
    row_sum : np.ndarray
        ``row_sum[i] = sum_j dist[i, j]``.
    p : float
        Norm order.
    """

    dist: np.ndarray
    row_sum: np.ndarray
    p: float

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def submatrix(self, start: int, stop: int) -> "DistanceMatrix":
        """Distances among observations ``start, ..., stop - 1``.

        Entries are copied, not recomputed, so they are bit-identical to
        computing the distances of the slice from scratch.
        """
        dist = np.ascontiguousarray(self.dist[start:stop, start:stop])
        return DistanceMatrix(dist=dist, row_sum=dist.sum(axis=1), p=self.p)


def pairwise_distances(data, p: float = 1.0) -> DistanceMatrix:
    """Compute all pairwise L_p distances ``(sum_l |x_il - x_jl|^p)^(1/p)``.

    Each entry depends only on the coordinate differences of its two rows, so
    the matrix is unchanged by adding a common vector to every observation.
    """
    p = check_p(p)
    x = as_data_matrix(data, min_n=2)
    if p == 1.0:
        condensed = pdist(x, "cityblock")
    elif p == 2.0:
        condensed = pdist(x, "euclidean")
    else:
        condensed = pdist(x, "minkowski", p=p)
    dist = squareform(condensed, checks=False)
    return DistanceMatrix(dist=dist, row_sum=dist.sum(axis=1), p=p)


def rescale_factor(d: int, p: float) -> float:
    """Dimension normalization ``d^(-1/p)`` applied to every distance average."""
    if d < 1:
        raise ParameterError(f"dimension must be positive, got {d}")
    return float(d) ** (-1.0 / check_p(p))
