"""Rank-based significance tests: Kruskal-Wallis and Wilcoxon signed-rank."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .special import chi2_sf, normal_sf

EXACT_WILCOXON_MAX_N = 20


class KruskalResult(NamedTuple):
    statistic: float
    pvalue: float
    df: int


class WilcoxonResult(NamedTuple):
    statistic: float
    pvalue: float
    n: int = 0
    exact: bool = True
    degenerate: bool = False


def midranks(values) -> tuple[np.ndarray, np.ndarray]:
    """1-based ranks with ties sharing their average rank, plus the tie-group sizes."""
    x = np.asarray(values, dtype=float).reshape(-1)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.shape[0])
    ties = []
    i = 0
    n = x.shape[0]
    while i < n:
        j = i
        while j + 1 < n and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        ties.append(j - i + 1)
        i = j + 1
    return ranks, np.asarray(ties, dtype=float)


def kruskal_wallis(groups) -> KruskalResult:
    """Kruskal-Wallis H test with tie correction; p from chi-square with g - 1 df."""
    groups = [np.asarray(g, dtype=float).reshape(-1) for g in groups]
    if len(groups) < 2:
        raise ValueError("Kruskal-Wallis needs at least two groups")
    if any(g.shape[0] == 0 for g in groups):
        raise ValueError("every group must be non-empty")
    sizes = np.array([g.shape[0] for g in groups], dtype=float)
    N = sizes.sum()
    if N < 3:
        raise ValueError("Kruskal-Wallis needs at least three observations")
    df = len(groups) - 1

    ranks, ties = midranks(np.concatenate(groups))
    correction = 1.0 - np.sum(ties**3 - ties) / (N**3 - N)
    if correction <= 0.0:
        return KruskalResult(0.0, 1.0, df)

    bounds = np.concatenate([[0], np.cumsum(sizes).astype(int)])
    rank_sums = np.array([ranks[bounds[i] : bounds[i + 1]].sum() for i in range(len(groups))])
    h = 12.0 / (N * (N + 1.0)) * np.sum(rank_sums**2 / sizes) - 3.0 * (N + 1.0)
    h = max(float(h / correction), 0.0)
    return KruskalResult(h, chi2_sf(h, df), df)


def _exact_signed_rank_pvalue(ranks: np.ndarray, w: float) -> float:
    """Two-sided P(min(W+, W-) <= w) over all 2^n equally likely sign patterns.

    Midranks are half-integers at worst, so sums are tracked on doubled ranks
    and the distribution of W+ is counted exactly.
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    reach = 0
    for r in doubled:
        r = int(r)
        counts[r : reach + r + 1] = counts[r : reach + r + 1] + counts[: reach + 1]
        reach += r
    w2 = int(round(2.0 * w))
    n_patterns = 2 ** len(doubled)
    low = sum(counts[: w2 + 1])
    high = sum(counts[total - w2 :])
    if w2 >= total - w2:
        return 1.0
    return min(1.0, float((low + high) / n_patterns))


def wilcoxon_signed_rank(paired_diffs) -> WilcoxonResult:
    """Wilcoxon signed-rank test on paired differences.

    Zero differences are dropped. ``W = min(W+, W-)`` on midranks of ``|d|``.
    The two-sided p-value is exact for ``n <= 20`` and otherwise uses the
    normal approximation with tie-corrected variance and a 0.5 continuity
    correction.
    """
    d = np.asarray(paired_diffs, dtype=float).reshape(-1)
    if d.shape[0] == 0:
        raise ValueError("no differences given")
    if not np.all(np.isfinite(d)):
        raise ValueError("differences must be finite")
    d = d[d != 0.0]
    n = d.shape[0]
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, True, True)

    ranks, ties = midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_WILCOXON_MAX_N:
        return WilcoxonResult(w, _exact_signed_rank_pvalue(ranks, w), n, True, False)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(ties**3 - ties) / 48.0
    if var <= 0:
        return WilcoxonResult(w, 1.0, n, False, True)
    z = max(abs(w - mean) - 0.5, 0.0) / math.sqrt(var)
    return WilcoxonResult(w, min(1.0, 2.0 * normal_sf(z)), n, False, False)
