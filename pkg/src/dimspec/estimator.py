"""Empirical box dimensions, Assouad/lower spectra and two-scale dimensions.

Per-rung exponents are log-count ratios. For the spectra and the two-scale
dimensions the count is normalized by what a line segment gives: the most
cells a ball of radius R can meet (ceil(2R/r) + 1) for the sup, and the
fewest a ball flush with an end can meet for the inf. The latter uses
R - 2*resolution, since the sample may stop that far short of the edge.
A segment then reads 1 at every scale pair. The limits are those of
dividing by log(R/r), with far less finite-scale bias.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import counting
from .geometry import (DimensionEstimate, ScaleSchedule, SpectrumEstimate, ThetaGrid, TraceRow,
                       default_schedule)

MIN_SPECTRUM_RUNGS = 3
MIN_DIM_RUNGS = 2
PAIR_RATIO = 16.0
_REL = 1e-12


class TooFewScales(ValueError):
    """Not enough admissible rungs; ``theta_min`` is the smallest usable theta if known."""

    def __init__(self, message, theta_min=None):
        super().__init__(message)
        self.theta_min = theta_min


def _cap(F, sched):
    cap = sched.r_cap if sched.r_cap is not None else F.diameter / 4
    # exponents divide by -log R, so radii must stay below 1
    return min(cap, math.nextafter(1.0, 0.0))


def _floor(F, sched):
    return sched.floor_factor * F.resolution


def _normalizer(R, r, kind, res):
    q = R / r
    if kind == "assouad":
        # most cells a segment of length 2R can meet
        return math.log(math.ceil(2 * q * (1 - 1e-12)) + 1)
    # fewest cells a sampled segment of length R can meet; the nudges absorb rounding at integers
    return math.log(max(math.ceil((R - 2 * res) / r * (1 - 1e-12)), 2))


def _tail(n, fraction):
    return max(1, math.ceil(fraction * n - 1e-12))


def _pick(rows, kind):
    """Index of the extremal exponent; ties go to the smallest R (latest row)."""
    best = None
    for i, row in enumerate(rows):
        e = row.local_exponent
        if best is None or (e >= rows[best].local_exponent if kind in ("assouad", "upper_box")
                            else e <= rows[best].local_exponent):
            best = i
    return best


def _singleton(F):
    return len(F) == 1


def box_rungs(F, sched):
    cap = _cap(F, sched)
    floor = _floor(F, sched)
    return [float(R) for R in sched.ladder()
            if floor * (1 - _REL) <= R <= cap * (1 + _REL)]


def _box_dim(F, sched, kind):
    if _singleton(F):
        return DimensionEstimate(0.0, kind, (), 0)
    rungs = box_rungs(F, sched)
    if len(rungs) < MIN_SPECTRUM_RUNGS:
        raise TooFewScales(_box_reason(F, sched, len(rungs)))
    rows = []
    for R in rungs:
        n = counting.mesh_cover_count(F, R)
        rows.append(TraceRow(R, R, n, math.log(n) / -math.log(R), -1))
    tail = rows[-_tail(len(rows), sched.tail_fraction):]
    value = max(r.local_exponent for r in tail) if kind == "upper_box" else \
        min(r.local_exponent for r in tail)
    return DimensionEstimate(max(value, 0.0), kind, tuple(rows), len(rows))


def _box_reason(F, sched, n):
    cap = _cap(F, sched)
    floor = _floor(F, sched)
    if floor >= cap:
        return (f"{n} admissible rungs: the resolution floor {floor:.6g} is not below "
                f"the diameter cap {cap:.6g}")
    return (f"{n} admissible rungs between the resolution floor {floor:.6g} and the "
            f"diameter cap {cap:.6g}; need {MIN_SPECTRUM_RUNGS}")


def upper_box_dim(F, sched=None):
    sched = sched or default_schedule(F)
    return _box_dim(F, sched, "upper_box")


def lower_box_dim(F, sched=None):
    sched = sched or default_schedule(F)
    return _box_dim(F, sched, "lower_box")


def spectrum_rungs(F, sched, theta):
    """Admissible (R, r) pairs for one theta, with r = R**(1/theta)."""
    cap = _cap(F, sched)
    floor = _floor(F, sched)
    out = []
    for R in sched.ladder_for_theta(theta):
        R = float(R)
        if R > cap * (1 + _REL):
            continue
        r = sched.snap(R ** (1.0 / theta))
        if r >= floor * (1 - _REL) and r < R:
            out.append((R, r))
    return out


def theta_min(F, sched):
    """Smallest theta with enough rungs, from r = R**(1/theta) >= floor."""
    cap = _cap(F, sched)
    floor = _floor(F, sched)
    ladder = [float(R) for R in sched.ladder() if R <= cap * (1 + _REL)]
    if len(ladder) < MIN_SPECTRUM_RUNGS or not floor < 1:
        return None
    # the third-largest usable radius must still reach the floor
    R = ladder[MIN_SPECTRUM_RUNGS - 1]
    if R <= floor:
        return None
    return math.log(R) / math.log(floor)


def _spectrum_at(F, theta, sched, kind):
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    sched = sched or default_schedule(F)
    if _singleton(F):
        return SpectrumEstimate(theta, 0.0, kind, (), 0.0, 0, float("nan"))
    rungs = spectrum_rungs(F, sched, theta)
    if len(rungs) < MIN_SPECTRUM_RUNGS:
        tm = theta_min(F, sched)
        hint = f"; smallest usable theta is {tm:.4g}" if tm is not None else ""
        raise TooFewScales(f"theta={theta:.6g}: {len(rungs)} admissible rungs, "
                           f"need {MIN_SPECTRUM_RUNGS}{hint}", tm)
    extreme = counting.sup_local_count if kind == "assouad" else counting.inf_local_count
    rows = []
    for R, r in rungs:
        res = extreme(F, R, r)
        e = math.log(res.count) / _normalizer(R, r, kind, F.resolution)
        rows.append(TraceRow(R, r, res.count, e, res.index))
    ntail = _tail(len(rows), sched.tail_fraction)
    tail = rows[-ntail:]
    i = _pick(tail, kind)
    x = np.array([(1 - 1 / theta) * math.log(row.R) for row in tail])
    y = np.array([math.log(row.count) for row in tail])
    slope = float(np.polyfit(x, y, 1)[0]) if len(tail) >= 2 and np.ptp(x) > 0 else float("nan")
    return SpectrumEstimate(theta, max(tail[i].local_exponent, 0.0), kind, tuple(rows), slope,
                            len(rows), tail[i].R)


def assouad_spectrum_at(F, theta, sched=None):
    return _spectrum_at(F, theta, sched, "assouad")


def lower_spectrum_at(F, theta, sched=None):
    return _spectrum_at(F, theta, sched, "lower")


def _threads():
    try:
        n = int(os.environ.get("DIMSPEC_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def spectrum_sweep(F, grid, sched=None, kind="assouad", skipped=None):
    """One estimate per theta in grid order; thetas without enough rungs are skipped.

    Skip reasons are appended to ``skipped`` as (theta, message) when given.
    """
    if not isinstance(grid, ThetaGrid):
        grid = ThetaGrid(tuple(grid))
    sched = sched or default_schedule(F)
    fn = assouad_spectrum_at if kind == "assouad" else lower_spectrum_at
    if kind not in ("assouad", "lower"):
        raise ValueError(f"unknown spectrum kind {kind!r}")

    def one(theta):
        try:
            return fn(F, theta, sched)
        except TooFewScales as exc:
            return exc

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(t) for t in grid]
    out = []
    reasons = []
    for theta, res in zip(grid, results):
        if isinstance(res, TooFewScales):
            reasons.append((theta, str(res)))
        else:
            out.append(res)
    if skipped is not None:
        skipped.extend(reasons)
    if not out:
        raise TooFewScales("every theta was skipped: " + "; ".join(m for _, m in reasons))
    return out


def pair_rungs(F, sched):
    cap = _cap(F, sched)
    floor = _floor(F, sched)
    return [float(R) for R in sched.ladder()
            if floor * (1 - _REL) <= R <= cap * (1 + _REL)]


def _two_scale(F, sched, kind):
    sched = sched or default_schedule(F)
    if _singleton(F):
        return DimensionEstimate(0.0, kind, (), 0)
    rungs = pair_rungs(F, sched)
    if len(rungs) < MIN_DIM_RUNGS:
        raise TooFewScales(_box_reason(F, sched, len(rungs)))
    extreme = counting.sup_local_count if kind == "assouad" else counting.inf_local_count
    rows = []
    for j, Rj in enumerate(rungs):
        for Rk in rungs[j + 1:]:
            if Rk > Rj / PAIR_RATIO * (1 + _REL):
                continue
            res = extreme(F, Rj, Rk)
            e = math.log(res.count) / _normalizer(Rj, Rk, kind, F.resolution)
            rows.append(TraceRow(Rj, Rk, res.count, e, res.index))
    if not rows:
        raise TooFewScales(f"no rung pair with ratio >= {PAIR_RATIO:g} between the floor "
                           f"{_floor(F, sched):.6g} and the cap {_cap(F, sched):.6g}")
    vals = [row.local_exponent for row in rows]
    value = max(vals) if kind == "assouad" else min(vals)
    return DimensionEstimate(max(value, 0.0), kind, tuple(rows), len(rows))


def assouad_dim_estimate(F, sched=None):
    return _two_scale(F, sched, "assouad")


def lower_dim_estimate(F, sched=None):
    return _two_scale(F, sched, "lower")


def moran_schedule(params, F, tail_fraction=0.5):
    """Radii L**(a**k) and L**(a**(k-1)*b) down to the sample resolution, capped at L.

    The floor sits at the resolution itself (the sample is exact at these
    scales) and every theta gets its fine radii aligned to the same set.
    """
    L, a, b = params.L, params.m_alpha, params.m_beta
    radii = set()
    for k in range(params.depth + 2):
        radii.add(L ** (a ** k))
        radii.add(L ** (a ** k * b))
    radii = sorted((R for R in radii if R >= F.resolution * (1 - _REL)), reverse=True)
    return ScaleSchedule(0.5, radii[0], len(radii), tail_fraction, radii=tuple(radii),
                         floor_factor=1.0, r_cap=L, theta_aligned=True)


__all__ = ["upper_box_dim", "lower_box_dim", "assouad_spectrum_at", "lower_spectrum_at",
           "spectrum_sweep", "assouad_dim_estimate", "lower_dim_estimate", "moran_schedule",
           "spectrum_rungs", "theta_min", "TooFewScales"]
