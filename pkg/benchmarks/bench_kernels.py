"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Prints best-of-``repeat`` wall times per case and the speedup.
"""

import argparse
import time

import numpy as np

from mlkuramoto import _backend, complete_inter, make_random_connected, make_ring_circulant
from mlkuramoto import assemble_full, multilayer, reduce
from mlkuramoto.dynamics import layered_operands


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(0)
    ring3 = multilayer([make_ring_circulant(100, 10)] * 3, complete_inter(3, 0.05))
    red = reduce(ring3).rbar
    A300 = assemble_full(ring3)
    big = multilayer([make_random_connected(100, 0.1, seed=l) for l in range(50)],
                     complete_inter(50, 0.01))
    ops = layered_operands(big)
    X = rng.normal(size=(100, 100))
    S = X + X.T
    th3 = rng.uniform(-np.pi, np.pi, 3)
    th300 = rng.uniform(-np.pi, np.pi, 300)
    th5000 = rng.uniform(-np.pi, np.pi, 5000)
    return [
        ("rk4_dense reduced M=3, 5000 steps",
         lambda k: k.rk4_dense(red, 0.0, th3, 0.01, 5000, 10)),
        ("rk4_dense N=300, 1000 steps",
         lambda k: k.rk4_dense(A300, 0.0, th300, 0.01, 1000, 10)),
        ("rk4_layered 5000 nodes, 200 steps",
         lambda k: k.rk4_layered(*ops, 0.0, th5000, 0.01, 200, 10)),
        ("jacobi_eigvals 100x100",
         lambda k: k.jacobi_eigvals(S)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    names = _backend.available()
    if "compiled" not in names:
        print("compiled kernels not built; only the numpy fallback is timed")
    print(f"{'case':40s}" + "".join(f"{n:>12s}" for n in names) + "     speedup")
    for label, fn in cases():
        times = {n: best_of(lambda: fn(_backend.get(n)), args.repeat) for n in names}
        row = f"{label:40s}" + "".join(f"{times[n]:11.4f}s" for n in names)
        if len(times) == 2:
            row += f"{times['python'] / times['compiled']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
