"""Agreement between two segmentations of the same sequence."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def breakpoints_to_labels(breakpoints, n: int) -> np.ndarray:
    """Label observations by segment: a breakpoint ``k`` starts a new label at ``k + 1``.

    ``breakpoints`` are sorted 1-based indices in ``1..n-1``.
    """
    bps = np.asarray(sorted(breakpoints), dtype=np.int64)
    if bps.size and (bps[0] < 1 or bps[-1] > n - 1 or np.any(np.diff(bps) <= 0)):
        raise DataError(f"breakpoints must be distinct and in 1..{n - 1}, got {list(bps)}")
    return np.searchsorted(bps, np.arange(n), side="right")


def labels_to_breakpoints(labels) -> list[int]:
    labels = np.asarray(labels)
    return [int(i) + 1 for i in np.flatnonzero(labels[1:] != labels[:-1])]


def _contingency(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"label vectors must have equal length, got {a.shape} and {b.shape}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _pairs(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def rand_index(a, b) -> float:
    """Fraction of observation pairs on which the two labelings agree."""
    table = _contingency(a, b)
    n = int(table.sum())
    total = n * (n - 1) // 2
    if total == 0:
        return 1.0
    both = int(_pairs(table).sum())
    same_a = int(_pairs(table.sum(axis=1)).sum())
    same_b = int(_pairs(table.sum(axis=0)).sum())
    # agreements = pairs together in both + pairs apart in both
    agree = total + 2 * both - same_a - same_b
    return agree / total


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected Rand index (Hubert-Arabie form).

    When the expected and maximal index coincide (both labelings trivial in the
    same way) the result is 1 for identical partitions and 0 otherwise.
    """
    table = _contingency(a, b)
    n = int(table.sum())
    total = n * (n - 1) // 2
    index = float(_pairs(table).sum())
    sa = float(_pairs(table.sum(axis=1)).sum())
    sb = float(_pairs(table.sum(axis=0)).sum())
    expected = sa * sb / total if total else 0.0
    maximum = 0.5 * (sa + sb)
    if maximum == expected:
        same = table.shape[0] == table.shape[1] and np.count_nonzero(table) == table.shape[0]
        return 1.0 if same else 0.0
    return (index - expected) / (maximum - expected)
