"""Jackknife scale estimate and normalization of the statistic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix, rescale_factor
from .errors import DegenerateScaleError, ParameterError
from .ustat import Regime, WeightSpec

#: smallest N for which the Darling-Erdos centering is used (log log log N > 0)
DARLING_ERDOS_MIN_N = 16


@dataclass(frozen=True)
class JackknifeEstimate:
    """Leave-one-out variance estimate for the normalized mean pair distance.

    Attributes
    ----------
    sigma_hat_sq : float
        Sample variance of the pseudo-observations.
    sigma_hat : float
        Its square root.
    u_full : float
        ``d^(-1/p)`` times the mean distance over all distinct pairs.
    pseudo_mean : float
        Mean of the pseudo-observations (equals ``u_full`` up to rounding).
    leave_one_out : np.ndarray
        The ``N`` leave-one-out statistics.
    pseudo : np.ndarray
        The ``N`` pseudo-observations.
    """

    sigma_hat_sq: float
    sigma_hat: float
    u_full: float
    pseudo_mean: float
    leave_one_out: np.ndarray
    pseudo: np.ndarray

    @property
    def degenerate(self) -> bool:
        return not self.sigma_hat > 0.0


def jackknife_sigma(dm: DistanceMatrix, d: int, p: float | None = None) -> JackknifeEstimate:
    """Jackknife estimate built from row sums in O(N) after the distance matrix.

    Dropping observation ``i`` removes exactly the ``N - 1`` distances in row
    ``i``, so every leave-one-out mean is ``(total - row_sum[i]) / C(N-1, 2)``.
    """
    n = dm.n
    if n < 3:
        raise ParameterError(f"jackknife needs at least 3 observations, got {n}")
    scale = rescale_factor(d, dm.p if p is None else p)
    total = 0.5 * float(dm.row_sum.sum())
    u_full = scale * total / (n * (n - 1) / 2.0)
    loo = scale * (total - dm.row_sum) / ((n - 1) * (n - 2) / 2.0)
    pseudo = n * u_full - (n - 1) * loo
    sigma_sq = float(np.var(pseudo, ddof=1))
    return JackknifeEstimate(
        sigma_hat_sq=sigma_sq,
        sigma_hat=math.sqrt(sigma_sq),
        u_full=u_full,
        pseudo_mean=float(pseudo.mean()),
        leave_one_out=loo,
        pseudo=pseudo,
    )


def darling_erdos_constants(x: float) -> tuple[float, float]:
    """Scaling ``a(x)`` and centering ``b(x)`` of the Darling-Erdos law (natural logs)."""
    lx = math.log(x)
    a = math.sqrt(2.0 * lx)
    b = 2.0 * lx + 0.5 * math.log(lx) - 0.5 * math.log(math.pi)
    return a, b


def normalize(T: float, sigma_hat: float, n: int, w: WeightSpec) -> float:
    """Put the raw statistic on the scale of its null limit.

    Returns ``sqrt(N) T / sigma_hat`` for ``kappa < 1/2`` and the centered
    Darling-Erdos form ``a(log N) sqrt(N) T / sigma_hat - b(log N)`` for
    ``kappa = 1/2``.
    """
    if not sigma_hat > 0.0:
        raise DegenerateScaleError("jackknife scale is zero; data look constant")
    scaled = math.sqrt(n) * T / sigma_hat
    if w.regime is Regime.INTEGRAL:
        return scaled
    if n < DARLING_ERDOS_MIN_N:
        raise ParameterError(
            f"Darling-Erdos normalization needs N >= {DARLING_ERDOS_MIN_N}, got {n}"
        )
    a, b = darling_erdos_constants(math.log(n))
    return a * scaled - b
