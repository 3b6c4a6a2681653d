"""Covering and packing counts on finite samples.

Covers use the r-mesh anchored at the origin (cell index floor(p/r) per
coordinate), balls are closed, and sup/inf over centers range over the sample
points with ties going to the earliest point in serialization order.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _backend
from .geometry import Point


@dataclass(frozen=True)
class LocalCountResult:
    count: int
    witness: Point
    index: int


def _check_r(r):
    if not r > 0:
        raise ValueError(f"scale must be positive, got {r}")


def mesh_cover_count(F, r):
    _check_r(r)
    if F.d == 1:
        # floor is monotone, so on sorted points each new cell is one change
        cells = np.floor(_view(F).xs / r)
        return int(1 + np.count_nonzero(cells[1:] != cells[:-1])) if len(cells) else 0
    cells = np.floor(F.points / r)
    lo = cells.min(axis=0)
    span = cells.max(axis=0) - lo + 1
    if span[0] * span[1] < 2.0 ** 62:
        # pack both cell indices into one integer key
        key = (cells[:, 0] - lo[0]).astype(np.int64) * np.int64(span[1]) + \
            (cells[:, 1] - lo[1]).astype(np.int64)
        return int(len(np.unique(key)))
    return int(len(np.unique(cells, axis=0)))


def packing_count(F, r):
    """Greedy first-fit packing: accept a point iff it is > 2r from every accepted center."""
    _check_r(r)
    return len(packing_centers(F, r))


def packing_centers(F, r):
    _check_r(r)
    sep = 2 * r
    pts = F.points
    sup = F.metric == "sup"
    grid = {}
    accepted = []
    keys = np.floor(pts / sep).astype(np.int64)
    offsets = [(a,) for a in (-1, 0, 1)] if F.d == 1 else \
        [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    for i in range(len(pts)):
        key = tuple(keys[i])
        p = pts[i]
        ok = True
        for off in offsets:
            for j in grid.get(tuple(k + o for k, o in zip(key, off)), ()):
                q = pts[j]
                if F.d == 1:
                    d = abs(p[0] - q[0])
                elif sup:
                    d = max(abs(p[0] - q[0]), abs(p[1] - q[1]))
                else:
                    dx = abs(p[0] - q[0])
                    dy = abs(p[1] - q[1])
                    d = math.sqrt(dx * dx + dy * dy)
                if d <= sep:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            grid.setdefault(key, []).append(i)
            accepted.append(i)
    return accepted


def _find_index(F, x):
    coords = np.asarray(x.coords if isinstance(x, Point) else x, dtype=float).ravel()
    if coords.shape[0] != F.d:
        raise ValueError("center dimension does not match the sample")
    hits = np.flatnonzero((F.points == coords).all(axis=1))
    if len(hits) == 0:
        raise ValueError("center is not a sample point")
    return int(hits[0])


def _check_scales(R, r):
    _check_r(r)
    if not r < R:
        raise ValueError(f"need r < R, got r={r}, R={R}")


def local_cover_count(F, x, R, r):
    _check_scales(R, r)
    i = _find_index(F, x)
    k = _backend.kernels()
    if F.d == 1:
        xs = F.points[:, 0]
        inside = np.abs(xs - xs[i]) <= R
        return int(len(np.unique(np.floor(xs[inside] / r))))
    return k.local_count_2d(F.points[:, 0], F.points[:, 1], F.points[i, 0], F.points[i, 1],
                            R, r, F.metric == "sup")


class _SortedView:
    """Ascending copy of a 1-d sample plus the map back to serialization order."""

    def __init__(self, F):
        xs = F.points[:, 0]
        self.order = np.argsort(xs, kind="stable")
        self.xs = np.ascontiguousarray(xs[self.order])


_views = {}
_cache = {}
_lock = threading.Lock()
_CACHE_LIMIT = 20000


def _view(F):
    with _lock:
        v = _views.get(id(F))
        if v is not None and v[0] is F:
            return v[1]
    view = _SortedView(F)
    with _lock:
        if len(_views) > 64:
            _views.clear()
        _views[id(F)] = (F, view)
    return view


def block_side(R, r):
    # blocks a few cells wide keep bounds tight while amortizing their cost
    return max(r, R / 8)


def _extreme(F, R, r, want_max):
    key = (id(F), float(R), float(r), bool(want_max))
    with _lock:
        hit = _cache.get(key)
        if hit is not None and hit[0] is F:
            return hit[1]
    k = _backend.kernels()
    if F.d == 1:
        view = _view(F)
        counts = k.local_counts_1d(view.xs, float(R), float(r))
        both = {}
        # one pass serves the sup and the inf; ties go to the first serialized index
        for flag, target in ((True, counts.max()), (False, counts.min())):
            both[flag] = (int(target), int(view.order[counts == target].min()))
        out = both[want_max]
        with _lock:
            _cache[key[:3] + (not want_max,)] = (F, both[not want_max])
    else:
        out = k.extreme_count_2d(F.points[:, 0], F.points[:, 1], float(R), float(r),
                                 F.metric == "sup", bool(want_max), block_side(R, r))
    with _lock:
        if len(_cache) > _CACHE_LIMIT:
            _cache.clear()
        _cache[key] = (F, out)
    return out


def clear_cache():
    with _lock:
        _cache.clear()
        _views.clear()


def sup_local_count(F, R, r):
    _check_scales(R, r)
    count, i = _extreme(F, R, r, True)
    return LocalCountResult(count, F.point(i), i)


def inf_local_count(F, R, r):
    _check_scales(R, r)
    count, i = _extreme(F, R, r, False)
    return LocalCountResult(count, F.point(i), i)


def all_local_counts(F, R, r):
    """Local count around every sample point, in serialization order."""
    _check_scales(R, r)
    if F.d == 1:
        view = _view(F)
        counts_sorted = _backend.kernels().local_counts_1d(view.xs, float(R), float(r))
        counts = np.empty_like(counts_sorted)
        counts[view.order] = counts_sorted
        return counts
    from . import _fallback
    return _fallback.all_counts_2d(F.points[:, 0], F.points[:, 1], R, r, F.metric == "sup")
