"""Pure numpy versions of the compiled kernels, used when the extension is absent."""

import numpy as np

NAME = "python"


def local_counts_1d(xs, R, r):
    xs = np.asarray(xs, dtype=np.float64)
    n = len(xs)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    cells = np.floor(xs / r)
    prefix = np.zeros(n, dtype=np.int64)
    prefix[1:] = np.cumsum(cells[1:] != cells[:-1])
    # searchsorted on xs -/+ R rounds differently from the xs[j] - xs[i] <= R
    # predicate; the loops below nudge each end onto the exact predicate
    lo = np.searchsorted(xs, xs - R, side="left")
    while True:
        m = (lo > 0) & (xs - xs[np.maximum(lo - 1, 0)] <= R)
        if not m.any():
            break
        lo[m] -= 1
    while True:
        m = xs - xs[lo] > R
        if not m.any():
            break
        lo[m] += 1
    hi = np.searchsorted(xs, xs + R, side="right") - 1
    hi = np.clip(hi, 0, n - 1)
    while True:
        m = (hi < n - 1) & (xs[np.minimum(hi + 1, n - 1)] - xs <= R)
        if not m.any():
            break
        hi[m] += 1
    while True:
        m = xs[hi] - xs > R
        if not m.any():
            break
        hi[m] -= 1
    return 1 + prefix[hi] - prefix[lo]


def _dist(xs, ys, px, py, sup):
    dx = np.abs(xs - px)
    dy = np.abs(ys - py)
    if sup:
        return np.maximum(dx, dy)
    return np.sqrt(dx * dx + dy * dy)


def local_count_2d(xs, ys, px, py, R, r, sup):
    inside = _dist(xs, ys, px, py, sup) <= R
    cells = np.stack([np.floor(xs[inside] / r), np.floor(ys[inside] / r)], axis=1)
    return int(len(np.unique(cells, axis=0)))


def _cell_ids(xs, ys, r):
    cells = np.stack([np.floor(xs / r), np.floor(ys / r)], axis=1)
    _, ids = np.unique(cells, axis=0, return_inverse=True)
    return ids.ravel()


def all_counts_2d(xs, ys, R, r, sup, chunk=2_000_000):
    """Local count for every center, grouped through an R-sized bucket grid."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = len(xs)
    ids = _cell_ids(xs, ys, r)
    side = R * (1 + 1e-9)
    bx = np.floor(xs / side).astype(np.int64)
    by = np.floor(ys / side).astype(np.int64)
    buckets = {}
    for i, key in enumerate(zip(bx.tolist(), by.tolist())):
        buckets.setdefault(key, []).append(i)
    buckets = {k: np.array(v) for k, v in buckets.items()}
    counts = np.zeros(n, dtype=np.int64)
    for (kx, ky), centers in buckets.items():
        near = [buckets[(kx + a, ky + b)] for a in (-1, 0, 1) for b in (-1, 0, 1)
                if (kx + a, ky + b) in buckets]
        cand = np.concatenate(near)
        cid = ids[cand]
        uniq, local = np.unique(cid, return_inverse=True)
        local = local.ravel()
        step = max(1, chunk // max(len(cand), 1))
        for s in range(0, len(centers), step):
            cs = centers[s:s + step]
            dx = np.abs(xs[cand][None, :] - xs[cs][:, None])
            dy = np.abs(ys[cand][None, :] - ys[cs][:, None])
            d = np.maximum(dx, dy) if sup else np.sqrt(dx * dx + dy * dy)
            rows, cols = np.nonzero(d <= R)
            occ = np.zeros((len(cs), len(uniq)), dtype=bool)
            occ[rows, local[cols]] = True
            counts[cs] = occ.sum(axis=1)
    return counts


def extreme_count_2d(xs, ys, R, r, sup, want_max, block_side=None):
    counts = all_counts_2d(xs, ys, R, r, sup)
    # argmax/argmin return the first index on ties, i.e. serialization order
    i = int(np.argmax(counts) if want_max else np.argmin(counts))
    return int(counts[i]), i
