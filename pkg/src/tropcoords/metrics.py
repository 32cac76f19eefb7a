"""Exact bottleneck and Wasserstein-p distances between barcodes.

An interval (x, d) is the point (left, right) = (x, x+d); the distance
between two intervals is the sup distance of those endpoint pairs,
d((x1,d1),(x2,d2)) = max(|x1-x2|, |d1-d2+x1-x2|), and the distance from
an interval to the diagonal of zero-length intervals is d/2.  A partial
bijection matches a subset of one barcode to a subset of the other and
sends everything else to the diagonal.

bottleneck minimizes the worst penalty over partial bijections; it is
computed exactly by binary search over the finite set of attainable
penalty values, testing feasibility at each threshold with a maximum-
cardinality bipartite matching.  wasserstein minimizes the p-norm of the
penalty vector via one square minimum-cost assignment on the standard
diagonal-augmented cost matrix.  Both have brute-force oracle twins that
enumerate every partial bijection on small inputs.

Zero-length bars are dropped before matching: they sit on the diagonal
and contribute nothing to any penalty.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .barcode import Barcode, Interval
from .coords import _canonical_bars


class MetricError(ValueError):
    pass


class OracleSizeError(MetricError):
    """Brute-force oracle input too large to enumerate."""


def _xd(iv) -> tuple[float, float]:
    if isinstance(iv, Interval):
        return iv.x, iv.d
    x, d = iv
    return float(x), float(d)


def interval_dist(i, j) -> float:
    """Sup distance between intervals: max(|x1-x2|, |d1-d2+x1-x2|)."""
    x1, d1 = _xd(i)
    x2, d2 = _xd(j)
    dx = x1 - x2
    return max(abs(dx), abs(d1 - d2 + dx))


def diag_dist(i) -> float:
    """Distance from an interval to the diagonal: d/2."""
    _, d = _xd(i)
    return d / 2.0


def _dist_table(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]]):
    return [[interval_dist(ai, bj) for bj in b] for ai in a]


def bottleneck(a: Barcode, b: Barcode) -> float:
    """Min over partial bijections of the max matched/unmatched penalty."""
    ab = _canonical_bars(a)
    bb = _canonical_bars(b)
    n, m = len(ab), len(bb)
    if n == 0 and m == 0:
        return 0.0
    dist = _dist_table(ab, bb)
    half_a = [d / 2.0 for _, d in ab]
    half_b = [d / 2.0 for _, d in bb]
    candidates = sorted(set(half_a) | set(half_b) | {v for row in dist for v in row})

    def feasible(t: float) -> bool:
        # rows: bars of a, then diagonal partners of b's bars
        # cols: bars of b, then diagonal partners of a's bars
        size = n + m
        adj = np.zeros((size, size), dtype=bool)
        for i in range(n):
            for j in range(m):
                adj[i, j] = dist[i][j] <= t
            adj[i, m + i] = half_a[i] <= t
        for j in range(m):
            adj[n + j, j] = half_b[j] <= t
        adj[n:, m:] = True
        match = maximum_bipartite_matching(csr_matrix(adj), perm_type="column")
        return int((match != -1).sum()) == size

    lo, hi = 0, len(candidates) - 1
    # the largest candidate is feasible: send everything to the diagonal
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def wasserstein(p: float, a: Barcode, b: Barcode) -> float:
    """Min over partial bijections of (sum of penalty^p)^(1/p), p >= 1."""
    if not p >= 1.0:
        raise MetricError(f"Wasserstein order p={p} must be >= 1")
    ab = _canonical_bars(a)
    bb = _canonical_bars(b)
    n, m = len(ab), len(bb)
    if n == 0 and m == 0:
        return 0.0
    size = n + m
    cost = np.zeros((size, size))
    for i, ai in enumerate(ab):
        for j, bj in enumerate(bb):
            cost[i, j] = interval_dist(ai, bj) ** p
        cost[i, m:] = (ab[i][1] / 2.0) ** p
    for j in range(m):
        cost[n:, j] = (bb[j][1] / 2.0) ** p
    row_ind, col_ind = linear_sum_assignment(cost)
    total = float(cost[row_ind, col_ind].sum())
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# brute-force oracles

_ORACLE_LIMIT = 12


def _partial_bijections(n: int, m: int):
    """Yield every partial bijection as a tuple of (i, j) pairs."""
    idx_b = range(m)
    for r in range(min(n, m) + 1):
        for rows in combinations(range(n), r):
            for cols in permutations(idx_b, r):
                yield tuple(zip(rows, cols))


def oracle_distances(
    a: Barcode, b: Barcode, ps: Sequence[float] = (1.0, 2.0)
) -> tuple[float, list[float]]:
    """Exhaustive (bottleneck, [wasserstein_p ...]) in one enumeration."""
    for p in ps:
        if not p >= 1.0:
            raise MetricError(f"Wasserstein order p={p} must be >= 1")
    ab = _canonical_bars(a)
    bb = _canonical_bars(b)
    n, m = len(ab), len(bb)
    if n + m > _ORACLE_LIMIT:
        raise OracleSizeError(f"oracle limited to {_ORACLE_LIMIT} bars total, got {n + m}")
    dist = _dist_table(ab, bb)
    half_a = [d / 2.0 for _, d in ab]
    half_b = [d / 2.0 for _, d in bb]

    best_inf = None
    best_p = [None] * len(ps)
    for matching in _partial_bijections(n, m):
        matched_a = {i for i, _ in matching}
        matched_b = {j for _, j in matching}
        penalties = [dist[i][j] for i, j in matching]
        penalties += [half_a[i] for i in range(n) if i not in matched_a]
        penalties += [half_b[j] for j in range(m) if j not in matched_b]
        worst = max(penalties, default=0.0)
        if best_inf is None or worst < best_inf:
            best_inf = worst
        for t, p in enumerate(ps):
            total = sum(v**p for v in penalties)
            if best_p[t] is None or total < best_p[t]:
                best_p[t] = total
    return best_inf, [total ** (1.0 / p) for total, p in zip(best_p, ps)]


def bottleneck_oracle(a: Barcode, b: Barcode) -> float:
    best_inf, _ = oracle_distances(a, b, ps=())
    return best_inf


def wasserstein_oracle(p: float, a: Barcode, b: Barcode) -> float:
    _, (w,) = oracle_distances(a, b, ps=(p,))
    return w
