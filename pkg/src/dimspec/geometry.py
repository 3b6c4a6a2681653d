"""Core value types: points, finite samples of sets, scale ladders, estimates."""

import math
from dataclasses import dataclass, field

import numpy as np

METRICS = ("euclidean", "sup")


def _as_coords(p):
    if isinstance(p, Point):
        return p.coords
    if np.isscalar(p):
        return (float(p),)
    return tuple(float(c) for c in p)


@dataclass(frozen=True)
class Point:
    coords: tuple

    def __post_init__(self):
        coords = _as_coords(self.coords)
        if len(coords) not in (1, 2):
            raise ValueError(f"points must have 1 or 2 coordinates, got {len(coords)}")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinate in {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def d(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


def distance(a, b, metric="euclidean"):
    a = _as_coords(a)
    b = _as_coords(b)
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    diffs = [abs(x - y) for x, y in zip(a, b)]
    if len(diffs) == 1:
        return diffs[0]
    if metric == "sup":
        return max(diffs)
    # written out rather than hypot so every module rounds the same way
    d = math.sqrt(diffs[0] * diffs[0] + diffs[1] * diffs[1])
    if d == 0.0 and (diffs[0] or diffs[1]):
        # squares of subnormal differences underflow; keep distinct points apart
        return max(diffs)
    return d


def sample_diameter(points, metric="euclidean"):
    """Exact diameter of an (n, d) array of points under the given metric."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    if pts.shape[1] == 1:
        return float(pts[:, 0].max() - pts[:, 0].min())
    if metric == "sup":
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(span.max())
    return _euclidean_diameter_2d(pts)


def _euclidean_diameter_2d(pts):
    from scipy.spatial import ConvexHull
    from scipy.spatial import QhullError

    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError):
        # collinear: the lexicographic extremes are the farthest pair
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        a, b = pts[order[0]], pts[order[-1]]
        return distance(Point(tuple(a)), Point(tuple(b)), "euclidean")
    cand = pts[hull.vertices]
    if len(cand) <= 2048:
        return _pairwise_max(cand, cand)
    return _calipers(cand)


def _pairwise_max(a, b):
    best = 0.0
    for start in range(0, len(a), 512):
        block = a[start:start + 512]
        dx = block[:, None, 0] - b[None, :, 0]
        dy = block[:, None, 1] - b[None, :, 1]
        best = max(best, float(np.sqrt(dx * dx + dy * dy).max()))
    return best


def _calipers(hull):
    """Farthest pair of a convex polygon (vertices in counter-clockwise order).

    Rotating calipers finds the antipodal vertex of every edge; each is then
    checked against a small window of neighbours to absorb rounding in the
    area comparisons.
    """
    h = len(hull)
    xs = hull[:, 0].tolist()
    ys = hull[:, 1].tolist()

    def area(i, j, k):
        return abs((xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i]))

    anti = np.empty(h, dtype=np.int64)
    j = 1
    for i in range(h):
        i1 = (i + 1) % h
        steps = 0
        while steps < h and area(i, i1, (j + 1) % h) > area(i, i1, j):
            j = (j + 1) % h
            steps += 1
        anti[i] = j
    window = np.arange(-3, 4)
    best = 0.0
    for i0 in (0, 1):
        idx = np.arange(h)
        partner = (anti[:, None] + window[None, :]) % h
        src = (idx + i0) % h
        dx = hull[src, 0][:, None] - hull[partner, 0]
        dy = hull[src, 1][:, None] - hull[partner, 1]
        best = max(best, float(np.sqrt(dx * dx + dy * dy).max()))
    return best


@dataclass(frozen=True, eq=False)
class FiniteApprox:
    """A finite sample of a set, faithful to the ideal set within ``resolution``.

    ``points`` is an (n, d) float array, stored read-only. Instances hash by
    identity so count caches can key on them.
    """

    points: np.ndarray
    resolution: float
    diameter: float
    metric: str = "euclidean"
    label: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "resolution", float(self.resolution))
        object.__setattr__(self, "diameter", float(self.diameter))

    @classmethod
    def from_points(cls, points, resolution, metric="euclidean", label=""):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(pts, resolution, sample_diameter(pts, metric), metric, label)

    @property
    def d(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def point(self, i):
        return Point(tuple(self.points[i]))


def validate_approx(F):
    """List the violated invariants of ``F`` by name; empty means valid."""
    out = []
    pts = np.asarray(F.points)
    if pts.ndim != 2 or pts.shape[0] == 0:
        return ["empty"]
    if pts.shape[1] not in (1, 2):
        out.append("dimension-unsupported")
    if F.metric not in METRICS:
        out.append("unknown-metric")
    finite = bool(np.isfinite(pts).all())
    if not finite:
        out.append("nonfinite-coordinates")
    if not (F.resolution > 0):
        out.append("nonpositive-resolution")
    if len(np.unique(pts, axis=0)) != len(pts):
        out.append("duplicate-points")
    if finite and F.metric in METRICS and pts.shape[1] in (1, 2):
        true_diam = sample_diameter(pts, F.metric)
        if not math.isclose(true_diam, F.diameter, rel_tol=1e-12, abs_tol=1e-300):
            out.append("diameter-mismatch")
        if len(pts) > 1 and F.resolution > 0 and not (F.resolution < true_diam):
            out.append("resolution-not-below-diameter")
    return out


@dataclass(frozen=True)
class ScaleSchedule:
    """Geometric ladder R_k = r_max * rho**k, k < count.

    The extra knobs exist for construction-aligned ladders: ``radii`` replaces
    the geometric ladder outright, ``floor_factor`` scales the resolution floor
    on the fine radius, ``r_cap`` overrides the diameter/4 cap and
    ``theta_aligned`` adds R = s**theta for every ladder radius s, so the fine
    radius R**(1/theta) lands on the ladder too.
    """

    rho: float
    r_max: float
    count: int
    tail_fraction: float = 0.5
    radii: tuple = None
    floor_factor: float = 10.0
    r_cap: float = None
    theta_aligned: bool = False

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("count must be a positive integer")
        if not 0 < self.tail_fraction <= 1:
            raise ValueError("tail_fraction must lie in (0, 1]")
        if self.radii is not None:
            radii = tuple(sorted({float(r) for r in self.radii}, reverse=True))
            if not radii or radii[-1] <= 0:
                raise ValueError("explicit radii must be positive")
            object.__setattr__(self, "radii", radii)
        elif not self.r_max * self.rho ** (self.count - 1) > 0:
            raise ValueError("ladder underflows to zero")

    def ladder(self):
        if self.radii is not None:
            return np.array(self.radii)
        return self.r_max * self.rho ** np.arange(self.count)

    def ladder_for_theta(self, theta):
        base = self.ladder()
        if not self.theta_aligned:
            return base
        both = np.sort(np.concatenate([base, base ** theta]))[::-1]
        keep = [both[0]]
        for v in both[1:]:
            if v < keep[-1] * (1 - 1e-9):
                keep.append(v)
        return np.array(keep)

    def snap(self, r):
        """The ladder radius within relative 1e-9 of r, else r itself."""
        if not self.theta_aligned:
            return r
        base = self.ladder()
        k = int(np.argmin(np.abs(base - r)))
        return float(base[k]) if abs(base[k] - r) <= 1e-9 * r else r


def default_schedule(F, rho=2 ** -0.5, tail_fraction=0.5, floor_factor=10.0):
    """Longest ladder from diameter/4 down to the resolution floor."""
    r_max = F.diameter / 4 if F.diameter > 0 else F.resolution
    floor = floor_factor * F.resolution
    if r_max <= floor:
        count = 1
    else:
        count = int(math.floor(math.log(floor / r_max) / math.log(rho) + 1e-9)) + 1
    return ScaleSchedule(rho, r_max, max(count, 1), tail_fraction, floor_factor=floor_factor)


@dataclass(frozen=True)
class ThetaGrid:
    thetas: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in self.thetas)
        if not th:
            raise ValueError("empty theta grid")
        if any(not 0 < t < 1 for t in th):
            raise ValueError("every theta must lie in (0, 1)")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("theta grid must be strictly increasing")
        object.__setattr__(self, "thetas", th)

    @classmethod
    def arange(cls, start, stop, step):
        n = int(round((stop - start) / step)) + 1
        return cls(tuple(round(start + i * step, 12) for i in range(n)))

    def __iter__(self):
        return iter(self.thetas)

    def __len__(self):
        return len(self.thetas)


DEFAULT_GRID = ThetaGrid.arange(0.05, 0.95, 0.05)


@dataclass(frozen=True)
class TraceRow:
    R: float
    r: float
    count: int
    local_exponent: float
    witness: int


@dataclass(frozen=True)
class SpectrumEstimate:
    theta: float
    value: float
    kind: str
    trace: tuple
    slope_fit: float
    admissible_rungs: int
    witness_R: float


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    kind: str
    trace: tuple
    admissible: int


@dataclass(frozen=True)
class HolderParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 < self.alpha <= 1 <= self.beta):
            raise ValueError("need 0 < alpha <= 1 <= beta")


@dataclass(frozen=True)
class MoranParams:
    L: float
    m_alpha: float
    m_beta: float
    depth: int

    def __post_init__(self):
        if not 0 < self.L < 1:
            raise ValueError("L must lie in (0, 1)")
        if not self.m_alpha > self.m_beta > 1:
            raise ValueError("need m_alpha > m_beta > 1")
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValueError("depth must be a non-negative integer")
        for k in range(1, self.depth + 1):
            if self.child_count(k) < 1:
                raise ValueError(f"level {k} has no room for a child interval")

    def child_count(self, k):
        x = self.L ** (self.m_alpha ** (k - 1) * (1 - self.m_beta))
        # exact integers such as 0.05**-2 = 400 come out a hair low in floating point
        return int(math.floor(x * (1 + 1e-9)))

    def length(self, k):
        return self.L ** (self.m_alpha ** k)

    def gap(self, k):
        return self.L ** (self.m_alpha ** (k - 1) * self.m_beta)


@dataclass(frozen=True)
class Winding:
    """phi(a) = (1+a)**-param for ``power``, exp(-param*a) for ``exponential``."""

    family: str
    param: float

    def __post_init__(self):
        if self.family not in ("power", "exponential"):
            raise ValueError(f"unknown winding family {self.family!r}")
        if not self.param > 0:
            raise ValueError("winding parameter must be positive")

    def phi(self, a):
        a = np.asarray(a, dtype=float)
        if self.family == "power":
            return (1.0 + a) ** -self.param
        return np.exp(-self.param * a)

    def dphi(self, a):
        a = np.asarray(a, dtype=float)
        if self.family == "power":
            return -self.param * (1.0 + a) ** (-self.param - 1)
        return -self.param * np.exp(-self.param * a)

    def inverse(self, y):
        """Smallest angle with phi <= y."""
        if self.family == "power":
            return y ** (-1.0 / self.param) - 1.0
        return -math.log(y) / self.param


@dataclass(frozen=True)
class SpiralParams:
    winding: Winding
    alpha_max: float

    def __post_init__(self):
        if not self.alpha_max > 0:
            raise ValueError("alpha_max must be positive")


@dataclass(frozen=True)
class SequenceDescriptor:
    family: str
    param: float = None

    def __post_init__(self):
        if self.family not in ("power", "exp_sqrt", "exponential"):
            raise ValueError(f"unknown sequence family {self.family!r}")
        if self.family != "exp_sqrt" and not (self.param is not None and self.param > 0):
            raise ValueError(f"{self.family} sequences need a positive parameter")

    def f(self, n):
        n = np.asarray(n, dtype=float)
        if self.family == "power":
            return 1.0 / n ** self.param
        if self.family == "exp_sqrt":
            return np.exp(-np.sqrt(n))
        return np.exp(-self.param * n)

    def n_for(self, delta):
        """Minimal n with f(n) <= delta."""
        if self.family == "power":
            guess = delta ** (-1.0 / self.param)
        elif self.family == "exp_sqrt":
            guess = math.log(delta) ** 2
        else:
            guess = -math.log(delta) / self.param
        n = max(1, int(math.ceil(guess - 1e-9)))
        while n > 1 and self.f(n - 1) <= delta:
            n -= 1
        while self.f(n) > delta:
            n += 1
        return n

    def tag(self):
        if self.family == "exp_sqrt":
            return "exp_sqrt"
        key = "lambda" if self.family == "power" else "c"
        return f"{self.family}:{key}={self.param:g}"
