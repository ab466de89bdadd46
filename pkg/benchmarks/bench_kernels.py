"""Time the min-sum pass on both kernel backends.

Compiles a few random CNFs of growing size, then times batched passes with
each backend after a warm-up call (so numba's compile time is excluded).

    python3 benchmarks/bench_kernels.py --vars 20,30,40 --ratio 2 --batch 256
"""
import argparse
import random
import time

import numpy as np

from penaltydnnf import kernels
from penaltydnnf.compiler import compile_cnf
from penaltydnnf.logic import Literal


def random_cnf(rng, nvars, nclauses, width=3):
    names = [f"x{i}" for i in range(nvars)]
    cnf = frozenset(
        frozenset(Literal(v, rng.random() < 0.5) for v in rng.sample(names, width))
        for _ in range(nclauses))
    return names, cnf


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--vars", default="20,30,40", help="comma-separated variable counts")
    p.add_argument("--ratio", type=float, default=2.0, help="clauses per variable")
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args(argv)

    rng = random.Random(args.seed)
    original = kernels.backend()
    backends = ["numpy"]
    try:
        kernels.set_backend("numba")
        backends.insert(0, "numba")
    except RuntimeError:
        print("numba not installed; timing numpy only")

    print(f"{'vars':>5} {'clauses':>7} {'nodes':>7} {'edges':>7} "
          + " ".join(f"{b + ' ms':>10}" for b in backends) + "  speedup")
    for step, nvars in enumerate(int(x) for x in args.vars.split(",")):
        nclauses = round(nvars * args.ratio)
        names, cnf = random_cnf(rng, nvars, nclauses)
        c = compile_cnf(cnf, names)
        layout = c.layout
        pos = np.random.default_rng(step).random((args.batch, len(names)))
        neg = np.random.default_rng(step + 1).random((args.batch, len(names)))
        results, timings = [], []
        for b in backends:
            kernels.set_backend(b)
            results.append(kernels.minsum(layout, pos, neg))  # warm-up / JIT
            timings.append(best_of(lambda: kernels.minsum(layout, pos, neg), args.repeat))
        for r in results[1:]:
            np.testing.assert_allclose(r, results[0])
        speed = f"{timings[-1] / timings[0]:8.1f}x" if len(timings) > 1 else "       -"
        print(f"{nvars:>5} {nclauses:>7} {c.node_count:>7} {c.edge_count:>7} "
              + " ".join(f"{t * 1e3:>10.2f}" for t in timings) + f"  {speed}")
    kernels.set_backend(original)


if __name__ == "__main__":
    main()
