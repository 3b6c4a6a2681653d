"""Compiled kernels against the numpy fallback on the same inputs.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each row times
one kernel call per backend, best of N, and checks both return the same
answer.
"""

import argparse
import math
import time

import numpy as np

from dimspec import _backend
from dimspec import generators as gen
from dimspec.geometry import SequenceDescriptor, SpiralParams, Winding
from dimspec.counting import block_side


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    F = gen.gen_sequence(SequenceDescriptor("power", 1.0), 1e-9, compact=True)
    xs = np.ascontiguousarray(np.sort(F.points[:, 0]))
    for R, r in [(1e-2, 1e-4), (1e-3, 1e-6)]:
        yield (f"1d F_1 n={len(xs)} R={R:g} r={r:g}",
               lambda k, R=R, r=r: k.local_counts_1d(xs, R, r).max())
    rng = np.random.default_rng(0)
    P = rng.random((50_000, 2))
    w = Winding("power", 0.5)
    S = gen.gen_spiral(SpiralParams(w, gen.spiral_alpha_max(w, 1e-3)), 1e-3)
    for label, pts, R, r in [("uniform", P, 0.05, 0.005), ("spiral", S.points, 0.1, 0.01)]:
        x = np.ascontiguousarray(pts[:, 0])
        y = np.ascontiguousarray(pts[:, 1])
        yield (f"2d {label} n={len(x)} R={R:g} r={r:g}",
               lambda k, x=x, y=y, R=R, r=r:
               k.extreme_count_2d(x, y, R, r, False, True, block_side(R, r)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = _backend.available()
    if "compiled" not in names:
        print("compiled kernels are not built; only the fallback is available")
    print(f"{'case':44s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}  same")
    for label, fn in cases():
        times = {}
        outs = {}
        for name in names:
            with _backend.using(name):
                times[name], outs[name] = best_of(lambda: fn(_backend.kernels()), args.repeat)
        same = len({repr(o) for o in outs.values()}) == 1
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{label:44s}" + "".join(f"{times[n] * 1e3:10.1f}ms" for n in names)
              + f"{speed:9.1f}x  {same}")


if __name__ == "__main__":
    main()
