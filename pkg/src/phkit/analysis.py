"""Diagram post-processing: histograms, persistence images, and distances.

Distances allow matching points to their diagonal projections; essential
pairs must agree in count between the two diagrams (otherwise the distance
is infinite) and are matched among themselves by sorted birth. Bottleneck
is solved by binary search over candidate costs with bipartite matching,
Wasserstein by the Hungarian method on the diagonal-augmented cost matrix.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BadParams, BadRange


def _worker_count() -> int:
    """Worker cap from PHKIT_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("PHKIT_THREADS", "0")
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return max(1, k)


@dataclass
class DiagramHistogram:
    lo: float
    hi: float
    bins: int
    counts: np.ndarray
    overflow: int
    essential: int


@dataclass
class PersistenceImage:
    vector: np.ndarray
    lo: float
    hi: float
    bins: int
    sigma: float
    w_max: float
    weight_kind: str = "linear_ramp"

    @property
    def grid(self) -> np.ndarray:
        """(death, birth) view of the vector; birth runs fastest."""
        return self.vector.reshape(self.bins, self.bins)


@dataclass
class DiagramDistanceReport:
    value: float
    matching: list = field(default_factory=list)


def _finite_pairs(pd):
    mask = pd.finite_mask
    return pd.births[mask], pd.deaths[mask]


def histogram(pd, value_range, bins: int) -> DiagramHistogram:
    """2D histogram of finite pairs over a square (birth, death) window.

    Bins are half-open, the last one closed; counts[i][j] is the number of
    pairs with birth in bin i and death in bin j. Finite pairs outside the
    window land in the overflow tally; essential pairs are counted apart.
    """
    lo, hi = float(value_range[0]), float(value_range[1])
    bins = int(bins)
    if not lo < hi:
        raise BadRange(f"empty range [{lo}, {hi}]")
    if bins < 1:
        raise BadRange("bins must be >= 1")
    births, deaths = _finite_pairs(pd)
    counts = np.zeros((bins, bins), dtype=np.int64)
    inside = (births >= lo) & (births <= hi) & (deaths >= lo) & (deaths <= hi)
    b = births[inside]
    d = deaths[inside]
    width = (hi - lo) / bins
    bi = np.minimum(((b - lo) / width).astype(np.int64), bins - 1)
    di = np.minimum(((d - lo) / width).astype(np.int64), bins - 1)
    np.add.at(counts, (bi, di), 1)
    overflow = int(len(births) - inside.sum())
    essential = int((~pd.finite_mask).sum())
    return DiagramHistogram(lo, hi, bins, counts, overflow, essential)


def _image_chunk(births, deaths, weights, centers, sigma, cell_area):
    two_s2 = 2.0 * sigma * sigma
    norm = cell_area / (2.0 * np.pi * sigma * sigma)
    db = centers[None, :] - births[:, None]
    dd = centers[None, :] - deaths[:, None]
    gb = np.exp(-(db ** 2) / two_s2)
    gd = np.exp(-(dd ** 2) / two_s2)
    # outer product per pair: grid[death_bin, birth_bin]
    return norm * np.einsum("pd,pb->db", weights[:, None] * gd, gb)


def persistence_image(pd, value_range, bins: int, sigma: float,
                      w_max: float | None = None) -> PersistenceImage:
    """Gaussian-smoothed, diagonal-weighted vectorization of a diagram.

    Each finite pair contributes weight * Gaussian mass per bin, with the
    Gaussian density evaluated at bin centers and scaled by the bin area,
    so a single pair well inside the window sums to about its weight. The
    weight ramps linearly in persistence and saturates at w_max (default:
    the window height). The vector lists bins row-major, birth fastest.
    """
    lo, hi = float(value_range[0]), float(value_range[1])
    bins = int(bins)
    sigma = float(sigma)
    if not lo < hi:
        raise BadParams(f"empty range [{lo}, {hi}]")
    if bins < 1:
        raise BadParams("bins must be >= 1")
    if not sigma > 0:
        raise BadParams("sigma must be positive")
    if w_max is None:
        w_max = hi - lo
    w_max = float(w_max)
    if not w_max > 0:
        raise BadParams("w_max must be positive")

    births, deaths = _finite_pairs(pd)
    width = (hi - lo) / bins
    centers = lo + (np.arange(bins) + 0.5) * width
    grid = np.zeros((bins, bins))
    if len(births):
        weights = np.minimum((deaths - births) / w_max, 1.0)
        workers = min(_worker_count(), max(1, len(births) // 256))
        if workers > 1:
            chunks = np.array_split(np.arange(len(births)), workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = pool.map(
                    lambda ix: _image_chunk(births[ix], deaths[ix],
                                            weights[ix], centers, sigma,
                                            width * width),
                    chunks)
            for part in parts:  # fixed chunk order keeps the sum deterministic
                grid += part
        else:
            grid = _image_chunk(births, deaths, weights, centers, sigma,
                                width * width)
    return PersistenceImage(grid.ravel(), lo, hi, bins, sigma, w_max)


def _sup_cost(ab, ad, bb, bd):
    return max(abs(ab - bb), abs(ad - bd))


def _diag_cost(b, d):
    return (d - b) / 2.0


def _essential_part(a, b):
    ea = sorted(a.essential_births)
    eb = sorted(b.essential_births)
    if len(ea) != len(eb):
        return None, []
    cost = 0.0
    matches = []
    order_a = np.argsort(a.births[~a.finite_mask], kind="stable")
    order_b = np.argsort(b.births[~b.finite_mask], kind="stable")
    idx_a = np.flatnonzero(~a.finite_mask)[order_a]
    idx_b = np.flatnonzero(~b.finite_mask)[order_b]
    for i, j, x, y in zip(idx_a, idx_b, ea, eb):
        cost = max(cost, abs(x - y))
        matches.append((int(i), int(j)))
    return cost, matches


def _kuhn_perfect(adj, n_left, n_right):
    """Maximum bipartite matching size plus the matching itself."""
    match_r = [-1] * n_right

    def try_left(u, seen):
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_r[v] == -1 or try_left(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    size = 0
    for u in range(n_left):
        if try_left(u, [False] * n_right):
            size += 1
    return size, match_r


def bottleneck_distance(a, b) -> DiagramDistanceReport:
    """Smallest achievable worst edge over diagonal-augmented matchings."""
    if a.degree != b.degree:
        raise ValueError("diagrams compare within one degree")
    ess_cost, ess_matches = _essential_part(a, b)
    if ess_cost is None:
        return DiagramDistanceReport(float("inf"))
    ab, ad = _finite_pairs(a)
    bb, bd = _finite_pairs(b)
    ia = np.flatnonzero(a.finite_mask)
    ib = np.flatnonzero(b.finite_mask)
    m, n = len(ab), len(bb)

    diag_a = (ad - ab) / 2.0
    diag_b = (bd - bb) / 2.0
    if m and n:
        cross = np.maximum(np.abs(ab[:, None] - bb[None, :]),
                           np.abs(ad[:, None] - bd[None, :]))
    else:
        cross = np.zeros((m, n))
    candidates = np.unique(np.concatenate(
        [[0.0, ess_cost], diag_a, diag_b, cross.ravel()]))

    def matching_at(c):
        # left: a-points then n diagonal slots; right: b-points then m slots
        adj = []
        for i in range(m):
            row = [int(j) for j in np.flatnonzero(cross[i] <= c)]
            if diag_a[i] <= c:
                row.extend(range(n, n + m))
            adj.append(row)
        cheap_b = [int(j) for j in np.flatnonzero(diag_b <= c)]
        slot_row = cheap_b + list(range(n, n + m))
        for _ in range(n):
            adj.append(slot_row)
        return _kuhn_perfect(adj, m + n, n + m)

    lo_i, hi_i = 0, len(candidates) - 1
    # the largest candidate always works: everything matches the diagonal
    best = candidates[hi_i]
    best_match = None
    while lo_i <= hi_i:
        mid = (lo_i + hi_i) // 2
        c = candidates[mid]
        if c < ess_cost:
            lo_i = mid + 1
            continue
        size, match_r = matching_at(c)
        if size == m + n:
            best = c
            best_match = match_r
            hi_i = mid - 1
        else:
            lo_i = mid + 1
    if best_match is None:
        _, best_match = matching_at(best)

    matching = list(ess_matches)
    for v, u in enumerate(best_match):
        if u == -1:
            continue
        if u < m and v < n:
            matching.append((int(ia[u]), int(ib[v])))
        elif u < m:
            matching.append((int(ia[u]), None))
        elif v < n:
            matching.append((None, int(ib[v])))
    return DiagramDistanceReport(float(best), matching)


def wasserstein_distance(a, b, q: float = 1.0) -> DiagramDistanceReport:
    """Minimal (sum of cost^q)^(1/q) over diagonal-augmented matchings."""
    if a.degree != b.degree:
        raise ValueError("diagrams compare within one degree")
    q = float(q)
    if not q >= 1:
        raise BadParams("q must be >= 1")
    ess_cost, ess_matches = _essential_part(a, b)
    if ess_cost is None:
        return DiagramDistanceReport(float("inf"))
    ab, ad = _finite_pairs(a)
    bb, bd = _finite_pairs(b)
    ia = np.flatnonzero(a.finite_mask)
    ib = np.flatnonzero(b.finite_mask)
    m, n = len(ab), len(bb)
    size = m + n
    total = 0.0
    for i, j in ess_matches:
        total += abs(float(a.births[i]) - float(b.births[j])) ** q
    matching = list(ess_matches)
    if size:
        cost = np.zeros((size, size))
        if m and n:
            cross = np.maximum(np.abs(ab[:, None] - bb[None, :]),
                               np.abs(ad[:, None] - bd[None, :]))
            cost[:m, :n] = cross ** q
        if m:
            cost[:m, n:] = (((ad - ab) / 2.0) ** q)[:, None]
        if n:
            cost[m:, :n] = (((bd - bb) / 2.0) ** q)[None, :]
        rows, cols = linear_sum_assignment(cost)
        total += float(cost[rows, cols].sum())
        for r, c in zip(rows, cols):
            if r < m and c < n:
                matching.append((int(ia[r]), int(ib[c])))
            elif r < m:
                matching.append((int(ia[r]), None))
            elif c < n:
                matching.append((None, int(ib[c])))
    return DiagramDistanceReport(total ** (1.0 / q), matching)
