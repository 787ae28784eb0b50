"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel with the best-of-N time for each backend and the
speed-up.  Outputs of the two backends are compared before timing.
"""

import argparse
import timeit

import numpy as np

from lieequiv.kernels import backend_module
from lieequiv.liealg import VField

CASES = {
    "heisenberg drift": (("x", "y"), ["y^2", "1"]),
    "cubic 3d": (("x", "y", "z"), ["y*z - x^3", "x + 1/2*z^3 - y", "-y + x*y*z"]),
    "rotation": (("x", "y"), ["-y", "x"]),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        compiled = backend_module("compiled")
    except ImportError:
        print("compiled kernels not built; nothing to compare")
        return
    python = backend_module("python")
    print(f"{'case':<18} {'kernel':<14} {'compiled [ms]':>14} {'python [ms]':>12} {'speed-up':>9}")
    for name, (vars, comps) in CASES.items():
        F = VField.parse(vars, comps).packed()
        x0 = np.full(len(vars), 0.3)
        jobs = {
            "eval x1000": lambda k: [k.eval_field(F.coef, F.exps, F.comp, x0) for _ in range(1000)][-1],
            "rk4 2000": lambda k: k.rk4_flow(F.coef, F.exps, F.comp, x0, 1.0, 2000),
            "path 2000": lambda k: k.rk4_path(F.coef, F.exps, F.comp, x0, 5e-4, 2000)[-1],
            "adaptive": lambda k: k.adaptive_flow(F.coef, F.exps, F.comp, x0, 1.0, 1e-10, 1e12, 200000)[2],
        }
        for kname, job in jobs.items():
            a, b = job(compiled), job(python)
            if not np.allclose(a, b, rtol=1e-10, atol=1e-12):
                raise SystemExit(f"backends disagree on {name}/{kname}")
            tc = min(timeit.repeat(lambda: job(compiled), number=1, repeat=args.repeat))
            tp = min(timeit.repeat(lambda: job(python), number=1, repeat=args.repeat))
            print(f"{name:<18} {kname:<14} {1e3 * tc:14.3f} {1e3 * tp:12.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
