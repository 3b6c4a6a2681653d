"""Finite samples of the concrete sets: sequences, intervals, spirals, Moran sets,
products, unions and power-map images.

Every generator returns a FiniteApprox whose resolution is an analytic bound
on the Hausdorff distance between the sample and the ideal set.
"""

import math

import numpy as np

from .geometry import FiniteApprox, MoranParams, SequenceDescriptor, SpiralParams, Winding

MAX_POINTS = 10_000_000


def gen_sequence(desc, delta, compact=False):
    """{f(n) : n <= n_max} U {0}, n_max minimal with f(n_max) <= delta.

    With ``compact`` the terms whose gap to the next term has dropped below
    delta are replaced by a delta-spaced grid on [0, f(n_g)]. The grid and the
    dropped terms are within delta/2 of each other, so fidelity is kept while
    the point count stays bounded for slowly decaying sequences.
    """
    if not 0 < delta < float(desc.f(1)):
        raise ValueError(f"delta must lie in (0, f(1)) = (0, {float(desc.f(1))})")
    n_max = desc.n_for(delta)
    label = f"sequence:{desc.tag()}:delta={delta:.17g}"
    if not compact:
        if n_max + 1 > MAX_POINTS:
            raise ValueError(f"{n_max + 1} points exceed the {MAX_POINTS} limit; use compact=True")
        vals = desc.f(np.arange(n_max, 0, -1))
        pts = np.concatenate([[0.0], vals])
        return FiniteApprox.from_points(pts, delta, "euclidean", label)
    n_g = _first_small_gap(desc, delta, n_max)
    top = float(desc.f(n_g))
    m = int(math.floor(top / delta))
    if m + n_g > MAX_POINTS:
        raise ValueError("compact sample still exceeds the point limit")
    grid = np.arange(m + 1) * delta
    grid = grid[grid < top]
    pts = np.concatenate([grid, desc.f(np.arange(n_g, 0, -1))])
    return FiniteApprox.from_points(pts, delta, "euclidean", label + ":compact")


def _first_small_gap(desc, delta, n_max):
    """Smallest n with f(n) - f(n+1) < delta (gaps decrease, so bisect)."""
    lo, hi = 1, n_max
    if float(desc.f(1) - desc.f(2)) < delta:
        return 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if float(desc.f(mid) - desc.f(mid + 1)) < delta:
            hi = mid
        else:
            lo = mid
    return hi


def gen_interval(delta):
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    m = int(round(1 / delta))
    if abs(m * delta - 1) < 1e-9:
        pts = np.linspace(0.0, 1.0, m + 1)
    else:
        m = int(math.floor(1 / delta))
        pts = np.append(np.arange(m + 1) * delta, 1.0)
    return FiniteApprox.from_points(pts, delta / 2, "euclidean", f"interval:delta={delta:.17g}")


def spiral_alpha_max(winding, delta):
    """Smallest truncation angle whose radius is <= delta."""
    a = winding.inverse(delta)
    while float(winding.phi(a)) > delta:
        a = math.nextafter(a, math.inf)
    return a


def spiral_angles(winding, delta, stop, chunk=1024):
    """Angles from 0 to ``stop`` whose consecutive arc length is <= delta.

    Speed |d/da phi(a)e^{ia}| = sqrt(phi^2 + phi'^2) decreases in a for both
    families, so a step fixed at the start of a chunk stays safe for the whole
    chunk. Steps are capped at pi/16.
    """
    out = []
    a = 0.0
    while a < stop:
        speed = math.hypot(float(winding.phi(a)), float(winding.dphi(a)))
        h = min(math.pi / 16, delta / speed)
        block = a + h * np.arange(chunk)
        block = block[block < stop]
        out.append(block)
        a = float(block[-1]) + h
    out.append(np.array([stop]))
    return np.concatenate(out)


def _dense_angle(winding, delta, alpha_max):
    """First angle where consecutive coils are <= delta apart, capped at alpha_max."""
    def coil_gap(a):
        return float(winding.phi(a) - winding.phi(a + 2 * math.pi))

    if coil_gap(0.0) <= delta:
        return 0.0
    if coil_gap(alpha_max) > delta:
        return alpha_max
    lo, hi = 0.0, alpha_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if coil_gap(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def gen_spiral(params, delta, compact=True):
    """Planar samples of {phi(a)e^{ia}} U {0}.

    The arc is sampled with arc-length steps <= delta (hence chords <= delta).
    With ``compact`` (default) sampling stops once successive coils are within
    delta of each other and the disc they fill is represented by a
    delta-spaced square grid clipped to that disc; every grid point is within
    delta of a coil and every coil point within delta of the grid. Without it
    the arc runs to alpha_max and the origin alone stands in for the tail.
    """
    w = params.winding
    if not delta > 0:
        raise ValueError("delta must be positive")
    if float(w.phi(params.alpha_max)) > delta:
        raise ValueError(f"phi(alpha_max) = {float(w.phi(params.alpha_max)):.6g} exceeds delta")
    stop = _dense_angle(w, delta, params.alpha_max) if compact else params.alpha_max
    ang = spiral_angles(w, delta, stop)
    rad = w.phi(ang)
    parts = [np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)]
    core = float(w.phi(stop))
    if compact and core > delta:
        m = int(math.floor(core / delta))
        ij = np.arange(-m, m + 1) * delta
        gx, gy = np.meshgrid(ij, ij, indexing="ij")
        gx = gx.ravel()
        gy = gy.ravel()
        keep = gx * gx + gy * gy <= core * core
        parts.append(np.stack([gx[keep], gy[keep]], axis=1))
    else:
        parts.append(np.zeros((1, 2)))
    pts = np.concatenate(parts)
    if len(pts) > MAX_POINTS:
        raise ValueError(f"{len(pts)} points exceed the {MAX_POINTS} limit")
    # a grid point can coincide with the origin; keep first occurrences only
    _, first = np.unique(pts, axis=0, return_index=True)
    pts = pts[np.sort(first)]
    label = (f"spiral:{w.family}:param={w.param:.17g}:alpha_max={params.alpha_max:.17g}"
             f":delta={delta:.17g}:arc={len(ang)}")
    return FiniteApprox.from_points(pts, delta, "euclidean", label)


def gen_moran(params):
    """Left-justified nested packing: endpoints of the depth-level intervals."""
    p = params
    total = 1
    for k in range(1, p.depth + 1):
        total *= p.child_count(k)
        if 2 * total > MAX_POINTS:
            raise ValueError(f"depth {p.depth} needs {total}+ intervals; limit is {MAX_POINTS // 2}")
    lefts = np.zeros(1)
    parent = p.L
    for k in range(1, p.depth + 1):
        length = p.length(k)
        gap = p.gap(k)
        if not (length > 1e-300 and gap > 1e-300):
            raise ValueError(f"level {k} lengths underflow double precision")
        c = p.child_count(k)
        if c * length + (c - 1) * gap > parent * (1 + 1e-9):
            raise AssertionError(f"level {k} children overflow their parent")
        offsets = np.arange(c) * (length + gap)
        lefts = (lefts[:, None] + offsets[None, :]).ravel()
        parent = length
    pts = np.sort(np.concatenate([lefts, lefts + parent]))
    label = f"moran:L={p.L:.17g}:alpha={p.m_alpha:.17g}:beta={p.m_beta:.17g}:depth={p.depth}"
    return FiniteApprox.from_points(pts, parent, "euclidean", label)


def gen_product(F, G):
    if F.d != 1 or G.d != 1:
        raise ValueError("products take two one-dimensional samples")
    if len(F) * len(G) > MAX_POINTS:
        raise ValueError(f"product has {len(F) * len(G)} points; limit is {MAX_POINTS}")
    x = np.repeat(F.points[:, 0], len(G))
    y = np.tile(G.points[:, 0], len(F))
    label = f"product({F.label})x({G.label})"
    return FiniteApprox.from_points(np.stack([x, y], axis=1), max(F.resolution, G.resolution),
                                    "sup", label)


def gen_holder_image(F, alpha):
    if F.d != 1:
        raise ValueError("power-map images take one-dimensional samples")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    xs = F.points[:, 0]
    if xs.min() < 0 or xs.max() > 1:
        raise ValueError("points must lie in [0, 1]")
    img = xs ** alpha
    if len(np.unique(img)) != len(img):
        raise ValueError("image points collide in double precision")
    res = F.resolution ** alpha if alpha <= 1 else alpha * F.resolution
    return FiniteApprox.from_points(img, res, F.metric, f"holder({F.label})^{alpha:.17g}")


def gen_union(F, G):
    if F.d != G.d:
        raise ValueError("ambient dimensions differ")
    if F.metric != G.metric:
        raise ValueError("metrics differ")
    pts = np.concatenate([F.points, G.points])
    _, first = np.unique(pts, axis=0, return_index=True)
    pts = pts[np.sort(first)]
    return FiniteApprox.from_points(pts, max(F.resolution, G.resolution), F.metric,
                                    f"union({F.label})({G.label})")


def translate(F, offset):
    off = np.broadcast_to(np.asarray(offset, dtype=float), (F.d,))
    return FiniteApprox(F.points + off, F.resolution, F.diameter, F.metric,
                        f"shift({F.label})")


__all__ = ["gen_sequence", "gen_interval", "gen_spiral", "gen_moran", "gen_product",
           "gen_holder_image", "gen_union", "translate", "spiral_alpha_max",
           "spiral_angles", "SequenceDescriptor", "SpiralParams", "Winding", "MoranParams"]
