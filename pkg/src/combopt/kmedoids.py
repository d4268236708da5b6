"""K-medoids benchmark pack: distances, the clustering objective, and the
two greedy refiners (Voronoi iteration and PAM).

A medoid set is a length-k solution string over categories 1..m: the
1-based indices of the chosen representative points, repeats allowed.
The greedy refiners report how many objective evaluations they actually
performed, since evaluation counts are one of the ranking currencies.
"""

from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

VARIANCE_FLOOR = 1e-12


def mahalanobis_diag(data):
    """Pairwise distances with per-feature inverse-variance scaling.

    ``d[i, j] = sqrt(sum_f (a[i,f] - a[j,f])^2 / var_f)`` with population
    variances floored at 1e-12 so constant features stay finite.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] < 1:
        raise ValueError("need a 2-D array with at least 2 rows and 1 column")
    bad = ~np.isfinite(data)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(f"non-finite value at row {i}, column {j}")
    variances = np.maximum(data.var(axis=0), VARIANCE_FLOOR)
    return cdist(data, data, "seuclidean", V=variances)


def validate_distance_matrix(dm):
    """Reject matrices that are not square, symmetric, nonnegative with a
    zero diagonal."""
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.all(np.isfinite(dm)):
        raise ValueError("distance matrix entries must be finite")
    if (dm < 0).any():
        raise ValueError("distance matrix entries must be nonnegative")
    if np.diagonal(dm).any():
        raise ValueError("distance matrix diagonal must be zero")
    if not np.array_equal(dm, dm.T):
        raise ValueError("distance matrix must be symmetric")
    return dm


def kmedoids_objective(x, dm):
    """Sum over points of the distance to the nearest medoid in ``x``."""
    meds = np.asarray(x, dtype=np.int64) - 1
    return float(dm[:, meds].min(axis=1).sum())


class GreedyResult(NamedTuple):
    x: np.ndarray
    value: float
    evaluations: int
    trace: list
    best_index: int  # 1-based evaluation index where the final value first appeared


def random_medoids(m, k, rng):
    """k distinct 1-based medoid indices drawn uniformly without replacement."""
    return rng.choice(m, size=k, replace=False).astype(np.int64) + 1


def voronoi_iteration(x0, dm):
    """Alternate nearest-medoid assignment with within-cluster medoid
    recomputation until the objective stops improving.

    Assignment ties go to the lowest medoid position; a medoid whose
    cluster comes up empty is kept.  The evaluation count is the number of
    ``kmedoids_objective`` calls made (one per sweep plus the initial one);
    the within-cluster sums are not full objective evaluations.
    """
    dm = np.asarray(dm, dtype=float)
    x = np.asarray(x0, dtype=np.int64).copy()
    k = x.size
    evals = 0

    def score(candidate):
        nonlocal evals
        evals += 1
        return kmedoids_objective(candidate, dm)

    best = score(x)
    best_index = 1
    trace = [best]
    while True:
        assignment = np.argmin(dm[:, x - 1], axis=1)
        candidate = x.copy()
        for position in range(k):
            cluster = np.flatnonzero(assignment == position)
            if cluster.size == 0:
                continue
            within = dm[np.ix_(cluster, cluster)].sum(axis=1)
            candidate[position] = cluster[np.argmin(within)] + 1
        value = score(candidate)
        if value < best:
            x, best, best_index = candidate, value, evals
            trace.append(best)
        else:
            break
    return GreedyResult(x, best, evals, trace, best_index)


def pam(x0, dm):
    """Best-improvement swap search over (medoid position, non-medoid point).

    Every candidate swap is scored with a full objective evaluation; the
    single best strictly improving swap is applied each round, with ties
    broken by lowest (position, point).  Terminates when no swap improves.
    """
    dm = np.asarray(dm, dtype=float)
    x = np.asarray(x0, dtype=np.int64).copy()
    m = dm.shape[0]
    k = x.size
    evals = 0

    def score(candidate):
        nonlocal evals
        evals += 1
        return kmedoids_objective(candidate, dm)

    best = score(x)
    best_index = 1
    trace = [best]
    while True:
        current = set(int(v) for v in x)
        best_swap = None
        best_value = best
        swap_index = best_index
        for position in range(k):
            candidate = x.copy()
            for point in range(1, m + 1):
                if point in current:
                    continue
                candidate[position] = point
                value = score(candidate)
                if value < best_value:
                    best_value = value
                    best_swap = (position, point)
                    swap_index = evals
            candidate[position] = x[position]
        if best_swap is None:
            break
        x = x.copy()
        x[best_swap[0]] = best_swap[1]
        best = best_value
        best_index = swap_index
        trace.append(best)
    return GreedyResult(x, best, evals, trace, best_index)


def composed_objective(x, dm):
    """Clustering cost after Voronoi refinement of ``x``, negated so that a
    maximizing optimizer minimizes the cost.  Deterministic in (x, dm)."""
    return -voronoi_iteration(x, dm).value
