"""Brute-force reference implementations used only by the tests.

Everything here is computed directly from the definitions with explicit
Python loops over observation pairs; nothing is shared with the package's
distance matrix, prefix sums or row-sum shortcuts.
"""

import math
from itertools import combinations

import numpy as np
from scipy.optimize import brentq


def lp(x, y, p):
    return sum(abs(a - b) ** p for a, b in zip(x, y)) ** (1.0 / p)


def naive_ustats(X, p):
    """Return (u1, u2, u3, u4) for k = 2..N-2 by summing each definition directly.

    u4 is the mean over distinct pairs.
    """
    X = [list(r) for r in np.asarray(X, dtype=float)]
    n = len(X)
    u1, u2, u3 = [], [], []
    for k in range(2, n - 1):
        left = [lp(X[i], X[j], p) for i, j in combinations(range(k), 2)]
        right = [lp(X[i], X[j], p) for i, j in combinations(range(k, n), 2)]
        cross = [lp(X[i], X[j], p) for i in range(k) for j in range(k, n)]
        u1.append(sum(left) / math.comb(k, 2))
        u2.append(sum(right) / math.comb(n - k, 2))
        u3.append(sum(cross) / (k * (n - k)))
    allpairs = [lp(X[i], X[j], p) for i, j in combinations(range(n), 2)]
    u4 = sum(allpairs) / math.comb(n, 2)
    return np.array(u1), np.array(u2), np.array(u3), u4


def naive_paths(X, p, beta):
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    u1, u2, u3, u4 = naive_ustats(X, p)
    t = np.arange(2, n - 1) / n
    c = t * (1 - t) * d ** (-1.0 / p)
    v = c * (u1 - u2)
    z0 = c * (u3 - u4)
    z = 2 * (np.abs(1 - 2 * t) + n ** -0.5) ** (-beta) * z0
    return v, z, z0


def naive_jackknife(X, p):
    """sigma_hat^2 by recomputing every leave-one-out U-statistic from scratch."""
    X = [list(r) for r in np.asarray(X, dtype=float)]
    n, d = len(X), len(X[0])
    scale = d ** (-1.0 / p)

    def ustat(idx):
        pairs = list(combinations(idx, 2))
        return scale * sum(lp(X[i], X[j], p) for i, j in pairs) / len(pairs)

    full = ustat(range(n))
    loo = np.array([ustat([j for j in range(n) if j != i]) for i in range(n)])
    pseudo = n * full - (n - 1) * loo
    return float(np.sum((pseudo - pseudo.mean()) ** 2) / (n - 1)), full, loo


def kolmogorov_cdf(x, terms=100):
    k = np.arange(1, terms + 1)
    return 1.0 - 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k**2 * x**2))


def kolmogorov_quantile(q):
    return brentq(lambda x: kolmogorov_cdf(x) - q, 0.3, 3.0, xtol=1e-12)


def naive_rand(a, b):
    agree = 0
    pairs = list(combinations(range(len(a)), 2))
    for i, j in pairs:
        agree += (a[i] == a[j]) == (b[i] == b[j])
    return agree / len(pairs)
