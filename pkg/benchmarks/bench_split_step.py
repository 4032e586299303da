"""Compare the compiled and pure-numpy kernel backends.

    python3 benchmarks/bench_split_step.py --repeat 5

Times a full ``propagate`` call on the default experiment grid and the three
per-step kernels on their own, and checks that both backends agree.
"""
import argparse
import timeit

import numpy as np

from polsqueeze import kernels
from polsqueeze.experiment import default_fiber
from polsqueeze.pulse import TimeGrid, make_sech_pulse, propagate


def best_of(fn, repeat, number=1):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=8192)
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--energy-pj", type=float, default=14.6)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is available")

    grid = TimeGrid(args.samples, 10e-12)
    pulse = make_sech_pulse(args.energy_pj * 1e-12, 120e-15, 810e-9, grid)
    fiber = default_fiber()
    rng = np.random.default_rng(0)
    a = rng.standard_normal(args.samples) + 1j * rng.standard_normal(args.samples)
    h = np.exp(1j * rng.uniform(0, 2 * np.pi, args.samples))

    # backends are timed in alternating rounds so drift and warm-up hit both alike
    times = {name: {"propagate": [], "kerr": [], "multiply": [], "energy": []} for name in backends}
    for _ in range(args.repeat):
        for name in backends:
            k = kernels.get(name)
            buf = a.copy()
            t = times[name]
            t["propagate"].append(best_of(lambda: propagate(pulse, fiber, args.steps, backend=name), 1))
            t["kerr"].append(best_of(lambda: k.kerr_phase_step(buf, 1e-3), 1, 2000))
            t["multiply"].append(best_of(lambda: k.multiply_inplace(buf, h), 1, 2000))
            t["energy"].append(best_of(lambda: k.energy_sum(buf), 1, 2000))

    print(f"grid {args.samples} samples, {args.steps} steps, {args.energy_pj:g} pJ, "
          f"best of {args.repeat}")
    print(f"{'backend':<8} {'propagate':>12} {'kerr step':>12} {'multiply':>12} {'energy':>12}")
    results = {}
    for name in backends:
        t = {key: min(v) for key, v in times[name].items()}
        results[name] = propagate(pulse, fiber, args.steps, backend=name).samples
        print(f"{name:<8} {t['propagate'] * 1e3:10.1f}ms {t['kerr'] * 1e6:10.1f}us "
              f"{t['multiply'] * 1e6:10.1f}us {t['energy'] * 1e6:10.1f}us")
    if len(backends) == 2:
        speedup = min(times["python"]["propagate"]) / min(times["cython"]["propagate"])
        print(f"propagate speedup, cython over python: {speedup:.2f}x")

    if len(results) == 2:
        ref = results["python"]
        diff = np.abs(results["cython"] - ref).max() / np.abs(ref).max()
        print(f"max relative difference between backends: {diff:.2e}")


if __name__ == "__main__":
    main()
