"""Compare the compiled kernels against the numpy fallback.

    python3 bench/benchmark.py [--repeat 5] [--sizes 8,16,31,64]

Prints one line per (kernel, size) with the median time of each backend,
the speedup, and the largest disagreement between them.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from minsplit import kernels
from minsplit.guessing import part_overlaps


def _hermitian_stack(rng, batch, n):
    a = rng.standard_normal((batch, n, n)) + 1j * rng.standard_normal((batch, n, n))
    return a + np.conj(np.swapaxes(a, 1, 2))


def _time(fn, repeat):
    samples = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def _cases(rng, sizes):
    for n in sizes:
        stack = _hermitian_stack(rng, 64, n)
        yield f"min_eig   B=64 n={n}", lambda s=stack: kernels.min_eigvals_batch(s)
        yield f"eigvalsh  B=64 n={n}", lambda s=stack: kernels.eigvalsh_batch(s)
        small = stack[:8]
        yield f"eigh      B=8  n={n}", lambda s=small: kernels.eigh_batch(s)[0]
    for d in (11, 31, 101):
        w = rng.random((d, d))
        w /= w.sum()
        ov = part_overlaps(d, 1)
        yield f"branch_ml d={d}", lambda w=w, ov=ov: kernels.branch_ml_value(w, ov)[0]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--sizes", default="8,16,31,64")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the fallback is available", file=sys.stderr)
    sizes = [int(x) for x in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}{'max diff':>12}")
    for name, fn in _cases(rng, sizes):
        times, outs = {}, {}
        for b in backends:
            with kernels.use_backend(b):
                fn()  # warm up caches
                times[b], outs[b] = _time(fn, args.repeat)
        line = f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.3f}ms" for b in backends)
        if len(backends) == 2:
            diff = float(np.max(np.abs(np.asarray(outs["compiled"]) - np.asarray(outs["python"]))))
            line += f"{times['python'] / times['compiled']:>9.1f}x{diff:>12.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
