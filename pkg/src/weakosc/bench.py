"""Benchmark of the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the backend is fixed at import
time by the ``WEAKOSC_DISABLE_NUMBA`` flag.  The first call of every workload is
a warm-up so JIT compilation is excluded from the timings.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time

WORKLOADS = ("integrate", "exp_filters", "k3_reconstruct", "l3_quadrature")


def _setup(periods: float):
    from .coeffs import parse_family, parse_forcing
    from .integrate import Grid, SystemSpec, integrate_forced

    fam = parse_family("power:a=1,b=1")
    forcing = parse_forcing("powerdecay:g=2", 1.0)
    spec = SystemSpec(1.0, 0.0, 0.0, 0.0)
    grid = Grid.per_period(0.0, periods * 2.0 * math.pi, 1.0)
    return fam, forcing, spec, grid, integrate_forced


def _time_workloads(periods: float, repeats: int) -> dict[str, float]:
    import numpy as np

    from . import _accel, kernels
    from .filters import y_filters_quadrature

    fam, forcing, spec, grid, integrate_forced = _setup(periods)
    tr = integrate_forced(spec, fam, forcing, grid, 1e-10)
    t = tr.times
    idx = np.arange(0, t.size, 10, dtype=np.int64)
    fine = t[t <= min(t[-1], 50.0)]
    ay2 = tr.A * tr.y2
    calls = {
        "integrate": lambda: integrate_forced(spec, fam, forcing, grid, 1e-10),
        "exp_filters": lambda: y_filters_quadrature(forcing, 1.0, fine),
        "k3_reconstruct": lambda: kernels.k3_reconstruct(t, tr.x, fam.eval_p(t), fam.eval_dp(t), 1.0, idx),
        "l3_quadrature": lambda: kernels.l3_quadrature(t, ay2, 1.0, idx),
    }
    out = {"backend": _accel.BACKEND}
    for name, fn in calls.items():
        fn()
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    return out


def run_backend(disable_numba: bool, periods: float, repeats: int) -> dict:
    env = dict(os.environ)
    env["WEAKOSC_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    cmd = [sys.executable, "-m", "weakosc.bench", "--child", "--periods", str(periods),
           "--repeats", str(repeats)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def compare(periods: float = 40.0, repeats: int = 3) -> dict[str, dict]:
    return {"numba": run_backend(False, periods, repeats),
            "numpy": run_backend(True, periods, repeats)}


def format_table(results: dict[str, dict]) -> str:
    nb, np_ = results["numba"], results["numpy"]
    lines = [f"{'workload':16s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>9s}"]
    for w in WORKLOADS:
        a, b = nb[w], np_[w]
        lines.append(f"{w:16s} {a:11.4f} {b:11.4f} {b / a if a > 0 else math.inf:8.1f}x")
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="numba vs numpy kernel benchmark")
    ap.add_argument("--periods", type=float, default=40.0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    ap.add_argument("--json", action="store_true", help="print raw JSON")
    args = ap.parse_args(argv)
    if args.child:
        print(json.dumps(_time_workloads(args.periods, args.repeats)))
        return 0
    res = compare(args.periods, args.repeats)
    print(json.dumps(res, indent=2, sort_keys=True) if args.json else format_table(res))
    return 0


if __name__ == "__main__":
    sys.exit(main())
