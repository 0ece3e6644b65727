"""Time the compiled and pure-Python kernels on identical inputs.

Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from ewg import kernels


def cases(n_obs):
    y = np.random.default_rng(0).weibull(1.5, n_obs) + 1e-9
    head = (0.7, 1.0, 1.5, 0, 20000, 1.0, 0.0, 1e-15, 1e-300, 3)
    ghead = (-0.6, 1.3, 0.4, 0, 20000, 1.0, 0.0, 1e-15, 1e-300, 3)
    return {
        "loglik_score": lambda m: m.loglik_score(2.0, 1.0, 1.5, 0.5, y),
        "binom_power_head": lambda m: m.binom_power_head(*head),
        "binom_gamma_head": lambda m: m.binom_gamma_head(*ghead),
        "upper_gamma x200": lambda m: [m.upper_gamma(0.5 + 0.1 * i, 3.0) for i in range(200)],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5000, help="observations for the likelihood kernel")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<20}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases(args.n).items():
        best = {}
        for name, mod in backends.items():
            timer = timeit.Timer(lambda: fn(mod))
            loops, _ = timer.autorange()
            best[name] = min(timer.repeat(args.repeat, loops)) / loops
        row = "".join(f"{best[name] * 1e3:>11.3f} ms" for name in backends)
        ratio = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:<20}{row}{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
