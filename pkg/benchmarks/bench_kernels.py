"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per (kernel, backend) with the best wall time and the
speedup of the compiled version. Both backends get identical inputs and
their outputs are compared before timing.
"""

import argparse
import time

import numpy as np

from quditforge import kernels
from quditforge.constructions import AdderParams, block_adder
from quditforge.statevec import classical_batch, compile_classical, random_state


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def classical_case(rows):
    circ = block_adder(AdderParams(30, 5, "2-3-1"))
    rng = np.random.default_rng(0)
    states = rng.integers(0, 2, (rows, circ.width))
    return circ, states


def damping_case(width):
    psi = random_state(width, 3, 1).amplitudes
    lam = np.array([0.0, 3e-4, 6e-4])
    u = np.random.default_rng(2).random(width)
    return psi, lam, u


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--width", type=int, default=12)
    args = ap.parse_args()

    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; only the numpy fallback is available")
    backends = sorted(kernels.BACKENDS)

    circ, states = classical_case(args.rows)
    compile_classical(circ)  # warm any cache
    psi, lam, u = damping_case(args.width)

    outputs, timings = {}, {}
    prev = kernels.BACKEND
    for name in backends:
        kernels.use(name)
        outputs[name] = classical_batch(circ, states)
        timings[("classical_batch", name)] = best_of(lambda: classical_batch(circ, states), args.repeat)
        work = psi.copy()
        kernels.damp_idle(work, args.width, 3, lam, u)
        outputs[name + "/damp"] = work

        def damp():
            kernels.damp_idle(psi.copy(), args.width, 3, lam, u)

        timings[("damp_idle", name)] = best_of(damp, args.repeat)
    kernels.use(prev)

    if len(backends) == 2:
        assert np.array_equal(outputs["python"], outputs["compiled"])
        assert np.allclose(outputs["python/damp"], outputs["compiled/damp"], atol=1e-12)

    print(f"classical_batch: block adder n=30, {args.rows} rows; damp_idle: {args.width} qutrits")
    for kernel in ("classical_batch", "damp_idle"):
        for name in backends:
            print(f"{kernel:16s} {name:9s} {timings[(kernel, name)] * 1e3:9.2f} ms")
        if len(backends) == 2:
            ratio = timings[(kernel, "python")] / timings[(kernel, "compiled")]
            print(f"{kernel:16s} speedup   {ratio:9.1f}x")


if __name__ == "__main__":
    main()
