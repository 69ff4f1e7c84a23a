"""CSV input and per-observation hypergeometric subsampling of count data."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.stats import hypergeom

from .errors import DataError, ParameterError


def read_csv(path, has_header: bool = False, counts: bool = False) -> np.ndarray:
    """Read a rectangular numeric CSV: rows are observations, columns coordinates.

    With ``counts=True`` every cell must be a nonnegative integer and every row
    must have a positive total; an ``int64`` array is returned.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if has_header and lineno == 1:
                continue
            if not record or all(not c.strip() for c in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise DataError(
                    f"{path}:{lineno}: expected {width} fields, found {len(record)}"
                )
            try:
                rows.append([float(c) for c in record])
            except ValueError:
                bad = next(c for c in record if not _is_number(c))
                raise DataError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    x = np.asarray(rows, dtype=np.float64)
    if not counts:
        return x
    if np.any(x < 0) or np.any(x != np.round(x)):
        i = int(np.argwhere((x < 0) | (x != np.round(x)))[0, 0])
        raise DataError(f"{path}: data row {i + 1} has a negative or non-integer count")
    c = x.astype(np.int64)
    empty = np.flatnonzero(c.sum(axis=1) == 0)
    if empty.size:
        raise DataError(f"{path}: data row {empty[0] + 1} has no positive count")
    return c


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def write_csv(path, data, fmt: str | None = None) -> None:
    data = np.asarray(data)
    if fmt is None:
        fmt = "%d" if np.issubdtype(data.dtype, np.integer) else "%.17g"
    np.savetxt(path, data, delimiter=",", fmt=fmt)


def hypergeometric_subsample(counts, m: int, seed=None) -> np.ndarray:
    """Draw ``m`` items without replacement from every row's urn of colors.

    Row ``i`` holds ``counts[i, j]`` items of color ``j``. Colors are drawn
    sequentially: the number of color-``j`` items is hypergeometric given the
    items still to draw and the items of later colors, sampled by inverting
    its CDF with one uniform per row and color. Output rows sum to ``m``.
    """
    c = np.asarray(counts)
    if c.ndim != 2:
        raise DataError("counts must be a 2-d array")
    if not np.issubdtype(c.dtype, np.integer):
        if np.any(c != np.round(c)):
            raise DataError("counts must be integers")
        c = c.astype(np.int64)
    if np.any(c < 0):
        raise DataError("counts must be nonnegative")
    m = int(m)
    if m < 1:
        raise ParameterError(f"subsample size must be >= 1, got {m}")
    totals = c.sum(axis=1)
    short = np.flatnonzero(totals < m)
    if short.size:
        i = int(short[0])
        raise DataError(f"row {i} has only {int(totals[i])} items, fewer than m={m}")

    rng = np.random.default_rng(seed)
    n, d = c.shape
    out = np.zeros((n, d), dtype=np.int64)
    remaining_items = totals.astype(np.int64).copy()
    remaining_draws = np.full(n, m, dtype=np.int64)
    for j in range(d - 1):
        u = 1.0 - rng.random(n)  # in (0, 1]
        good = c[:, j]
        active = (remaining_draws > 0) & (good > 0)
        draw = np.zeros(n, dtype=np.int64)
        if active.any():
            draw[active] = hypergeom.ppf(
                u[active], remaining_items[active], good[active], remaining_draws[active]
            ).astype(np.int64)
        out[:, j] = draw
        remaining_items -= good
        remaining_draws -= draw
    out[:, d - 1] = remaining_draws
    return out
