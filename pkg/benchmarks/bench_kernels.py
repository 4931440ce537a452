"""Time the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]

The full-curve row runs in a subprocess per backend, since the backend is
fixed at import time.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from expurgate import kernels
from expurgate.channel import validate_channel, validate_input
from expurgate.exponents import ExponentInputs
from expurgate.optimize import rho_grid

CURVE_SNIPPET = """
import json, time
from expurgate import kernels
from expurgate.channel import validate_channel, validate_input
from expurgate.curves import all_curves
from expurgate.exponents import ExponentInputs
inp = ExponentInputs(validate_channel([[0.5, 0.5], [1e-10, 1 - 1e-10]]), validate_input([0.9, 0.1]))
t = time.perf_counter(); all_curves(inp); dt = time.perf_counter() - t
print(json.dumps({"backend": kernels.BACKEND, "seconds": dt}))
"""


def workloads(mod):
    rng = np.random.default_rng(0)
    ch = validate_channel(rng.dirichlet(np.ones(4), size=4))
    inp = ExponentInputs(ch, validate_input(rng.dirichlet(np.ones(4))))
    lp = np.ascontiguousarray(ch.log_transition)
    d = inp.distance(0.5).d
    grid = rho_grid(1.0, 1e4)
    q3 = np.array([0.2, 0.3, 0.5])
    d3 = np.ascontiguousarray(d[:3, :3])
    grids = np.ascontiguousarray(np.stack([np.linspace(0, 0.2, 30)] * 4))
    lengths = np.full(4, 30, dtype=np.int64)
    return {
        "chernoff_matrix 4x4": lambda: mod.chernoff_matrix(lp, 0.3),
        "sup_rho (64-pt grid + golden)": lambda: mod.sup_rho(d, inp.logq, 0.05, 1, grid, 1e-9),
        "log_fractional_moment M=2^16": lambda: mod.log_fractional_moment(1 << 16, -8.0, 0.5),
        "oracle_scan 3x3, 30^4 points": lambda: mod.oracle_scan(q3, d3, 0.5, grids, lengths),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    rows = {}
    for name, mod in backends.items():
        for label, fn in workloads(mod).items():
            n, _ = timeit.Timer(fn).autorange()
            best = min(timeit.repeat(fn, number=n, repeat=args.repeat)) / n
            rows.setdefault(label, {})[name] = best
    for name in backends:
        env = dict(os.environ)
        env.pop("EXPURGATE_PURE_PYTHON", None)
        if name == "python":
            env["EXPURGATE_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", CURVE_SNIPPET], capture_output=True, text=True, env=env, check=True)
        rows.setdefault("three curves, 201 rates", {})[name] = json.loads(out.stdout)["seconds"]

    names = list(backends)
    print(f"{'workload':34s}" + "".join(f"{n:>14s}" for n in names) + ("       speedup" if len(names) > 1 else ""))
    for label, t in rows.items():
        line = f"{label:34s}" + "".join(f"{t[n] * 1e3:12.3f}ms" for n in names)
        if "cython" in t:
            line += f"{t['python'] / t['cython']:13.1f}x"
        print(line)


if __name__ == "__main__":
    main()
