"""Compare the compiled integration kernels against the pure-Python fallback.

Runs each method on the same problem with both backends, checks that the
outputs agree, and prints a timing table. Usage:

    python3 benchmarks/benchmark_backends.py [--t-end T] [--repeats N]
"""

import argparse
import os
import time

import numpy as np


def run_case(method, t_end, spec_kwargs):
    from mbtop.core import preset
    from mbtop.integrate import IntegratorSpec, integrate

    b = preset("maxwell_bloch")
    spec = IntegratorSpec(method=method, **spec_kwargs)
    return integrate(b, [0.4, 1.0, 0.3], t_end, spec, n_out=401).states


def time_case(method, t_end, spec_kwargs, repeats):
    best = float("inf")
    states = None
    for _ in range(repeats):
        start = time.perf_counter()
        states = run_case(method, t_end, spec_kwargs)
        best = min(best, time.perf_counter() - start)
    return best, states


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--t-end", type=float, default=200.0)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    cases = [
        ("rk4_fixed", {"step": 0.005}),
        ("rk45_adaptive", {"rtol": 1e-10, "atol": 1e-12}),
        ("implicit_midpoint", {"step": 0.02, "newton_tol": 1e-13}),
    ]

    import mbtop.integrate as mi

    if mi._fastpath is None:
        raise SystemExit("compiled extension is not available; nothing to compare")

    print(f"{'method':<20} {'compiled':>10} {'pure':>10} {'speedup':>8} {'max diff':>10}")
    for method, kw in cases:
        os.environ.pop("MBTOP_PURE", None)
        assert mi.backend_name() == "compiled"
        t_fast, s_fast = time_case(method, args.t_end, kw, args.repeats)
        os.environ["MBTOP_PURE"] = "1"
        assert mi.backend_name() == "pure"
        t_slow, s_slow = time_case(method, args.t_end, kw, args.repeats)
        os.environ.pop("MBTOP_PURE", None)
        diff = float(np.max(np.abs(s_fast - s_slow)))
        print(
            f"{method:<20} {t_fast * 1e3:>8.2f}ms {t_slow * 1e3:>8.2f}ms "
            f"{t_slow / t_fast:>7.1f}x {diff:>10.2e}"
        )
        if diff > 1e-9:
            raise SystemExit(f"backends disagree on {method}: {diff}")


if __name__ == "__main__":
    main()
