"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 100]

Each kernel is run once per backend before timing so numba compilation is
excluded.  Reports the best of ``--repeat`` runs.
"""

import argparse
import timeit

import numpy as np

from delayed_opinions import kernels
from delayed_opinions.netgen import MixtureSpec, build_laplacian, generate, normalize_rows


def cases(n, seed):
    rng = np.random.default_rng(seed)
    w = normalize_rows(generate(MixtureSpec(n, 0.5, seed=seed)))
    a = build_laplacian(w)
    x0 = rng.uniform(-1, 1, n)
    z = 10 ** rng.uniform(-4, 2, 20000) * np.exp(1j * rng.uniform(-np.pi, np.pi, 20000))
    tau, steps, m = 4, 2000, 32

    def lambert(mod):
        return lambda: mod.lambertw0(z)

    def discrete(mod):
        def run():
            ring = np.tile(x0, (tau + 1, 1))
            mod.discrete_advance(np.zeros(n), w, ring, 0, steps, np.empty((steps, n)))
        return run

    def dde(mod):
        def run():
            g = np.empty((2 * m + 2, n))
            h = np.empty((2 * m + 2, n))
            g[0] = a @ x0
            h[0] = a @ g[0]
            mod.dde_advance(a, x0.copy(), g, h, 0, m, 0.5 / m, steps, np.empty((steps, n)))
        return run

    def ode(mod):
        return lambda: mod.ode_advance(a, x0.copy(), 0.001, steps, np.empty((steps, n)))

    return {
        "lambertw0 (20k points)": lambert,
        f"discrete_advance (n={n}, {steps} steps)": discrete,
        f"dde_advance (n={n}, {steps} steps)": dde,
        f"ode_advance (n={n}, {steps} steps)": ode,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = {"numpy": kernels.get_backend("numpy")}
    try:
        backends["numba"] = kernels.get_backend("numba")
    except ImportError:
        print("numba not installed; timing the numpy fallback only")

    print(f"{'kernel':42s}" + "".join(f"{name:>12s}" for name in backends) + f"{'speedup':>10s}")
    for label, make in cases(args.n, args.seed).items():
        times = {}
        for name, mod in backends.items():
            fn = make(mod)
            fn()
            times[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        row = f"{label:42s}" + "".join(f"{times[k] * 1e3:10.2f}ms" for k in backends)
        if "numba" in times:
            row += f"{times['numpy'] / times['numba']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
