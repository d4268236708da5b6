"""Method-comparison statistics: exact one-sided sign tests, step-up FDR
control, and the ratio-to-best ranking used to order methods across
datasets."""

import math
from dataclasses import dataclass

import numpy as np


class AllTiedError(ValueError):
    """Sign test undefined: every pair was an exact tie."""


def sign_test(scores_a, scores_b, higher_is_better=True):
    """Exact one-sided sign test that method A beats method B.

    Ties are dropped; with s wins for A out of n non-tied pairs the
    p-value is the exact binomial tail P[Bin(n, 1/2) >= s], computed with
    integer binomial coefficients (no normal approximation).
    """
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("need two equal-length 1-D score sequences")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("scores must be finite")
    if higher_is_better:
        wins = int(np.count_nonzero(a > b))
    else:
        wins = int(np.count_nonzero(a < b))
    n = int(np.count_nonzero(a != b))
    if n == 0:
        raise AllTiedError("all pairs tied; sign test undefined")
    return binomial_tail(n, wins)


def binomial_tail(n, s):
    """P[Bin(n, 1/2) >= s], exact via integer arithmetic."""
    if not 0 <= s <= n:
        raise ValueError("need 0 <= s <= n")
    return sum(math.comb(n, i) for i in range(s, n + 1)) / 2**n


def benjamini_hochberg(pvalues, q):
    """Step-up FDR control: flags (in input order) of the hypotheses found
    significant at level ``q``."""
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1:
        raise ValueError("p-values must be 1-D")
    if p.size == 0:
        return np.zeros(0, dtype=bool)
    if (p < 0).any() or (p > 1).any():
        raise ValueError("p-values must lie in [0, 1]")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    m = p.size
    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    thresholds = q * np.arange(1, m + 1) / m
    passing = np.flatnonzero(sorted_p <= thresholds)
    flags = np.zeros(m, dtype=bool)
    if passing.size:
        flags[order[: passing[-1] + 1]] = True
    return flags


@dataclass
class RankingTable:
    """Methods sorted by averaged ratio-to-best, with adjacent-pair tests.

    ``p_values[i]`` compares ``methods[i]`` against ``methods[i+1]`` on the
    raw per-dataset scores; ``tied[i]`` marks comparisons where every
    dataset tied (reported with the sentinel p-value 1.0).
    """

    methods: list
    avg_ratios: np.ndarray
    p_values: np.ndarray
    significant: np.ndarray
    tied: np.ndarray


def ratio_ranking(scores, methods, q=0.01):
    """Rank methods by their score ratio to the per-dataset best.

    ``scores`` is a (methods, datasets) table of lower-is-better values.
    Each score is divided by the smallest score any method achieved on
    that dataset, the ratios are averaged per method, and methods are
    sorted ascending.  Adjacent pairs get a one-sided sign test on the raw
    scores; flags come from step-up FDR control at level ``q``.
    """
    table = np.asarray(scores, dtype=float)
    if table.ndim != 2 or table.shape[0] != len(methods):
        raise ValueError("scores must be (methods, datasets) matching the method list")
    if not np.all(np.isfinite(table)):
        raise ValueError("scores must be finite")
    mins = table.min(axis=0)
    if (mins <= 0).any():
        raise ValueError("a dataset's minimal score is <= 0; ratios undefined")
    avg = (table / mins).mean(axis=1)
    order = np.argsort(avg, kind="stable")

    p_values = np.ones(max(len(methods) - 1, 0))
    is_tie = np.zeros(max(len(methods) - 1, 0), dtype=bool)
    for i in range(len(methods) - 1):
        better, worse = table[order[i]], table[order[i + 1]]
        try:
            p_values[i] = sign_test(better, worse, higher_is_better=False)
        except AllTiedError:
            p_values[i] = 1.0
            is_tie[i] = True
    significant = benjamini_hochberg(p_values, q) if p_values.size else np.zeros(0, dtype=bool)
    return RankingTable(
        methods=[methods[i] for i in order],
        avg_ratios=avg[order],
        p_values=p_values,
        significant=significant,
        tied=is_tie,
    )
