"""Independent exhaustive reference counts.

Nothing here touches the package's kernels: every ball is found by testing
every point, and every cell is a tuple of math.floor values in a Python set.
"""

import math


def dist(p, q, metric):
    if len(p) == 1:
        return abs(p[0] - q[0])
    dx = abs(p[0] - q[0])
    dy = abs(p[1] - q[1])
    if metric == "sup":
        return max(dx, dy)
    return math.sqrt(dx * dx + dy * dy)


def cell(p, r):
    return tuple(math.floor(c / r) for c in p)


def mesh_count(points, r):
    return len({cell(p, r) for p in points})


def local_count(points, x, R, r, metric):
    return len({cell(p, r) for p in points if dist(p, x, metric) <= R})


def extreme_count(points, R, r, metric, want_max):
    best = None
    best_i = None
    for i, x in enumerate(points):
        c = local_count(points, x, R, r, metric)
        if best is None or (c > best if want_max else c < best):
            best, best_i = c, i
    return best, best_i


def greedy_packing(points, r, metric):
    centers = []
    for i, p in enumerate(points):
        if all(dist(p, points[j], metric) > 2 * r for j in centers):
            centers.append(i)
    return centers


def all_local_counts(points, R, r, metric, chunk=256):
    """Local counts at every center by testing every pair, vectorized.

    Cells are grouped once; a center's count is the number of groups it
    reaches, read off with a boolean reduction over the sorted groups.
    """
    import numpy as np

    pts = np.asarray(points, dtype=float)
    cells = np.floor(pts / r).astype(np.int64)
    _, group = np.unique(cells, axis=0, return_inverse=True)
    group = group.ravel()
    order = np.argsort(group, kind="stable")
    starts = np.flatnonzero(np.r_[True, np.diff(group[order]) != 0])
    sorted_pts = pts[order]
    out = np.empty(len(pts), dtype=np.int64)
    for lo in range(0, len(pts), chunk):
        c = pts[lo:lo + chunk]
        diff = np.abs(c[:, None, :] - sorted_pts[None, :, :])
        if pts.shape[1] == 1 or metric == "sup":
            d = diff.max(axis=2)
        else:
            d = np.sqrt((diff ** 2).sum(axis=2))
        hit = d <= R
        out[lo:lo + chunk] = np.logical_or.reduceat(hit, starts, axis=1).sum(axis=1)
    return out
