"""Compare the compiled and numpy kernel backends.

Usage: ``python benchmarks/bench_kernels.py [--repeat R]``.  Times each kernel
on Clifford products of several sizes, then an end-to-end verification run in
a subprocess per backend (backend choice is fixed at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from starquant import kernels
from starquant.algebra import curve_eval
from starquant.clifford import clifford_algebra

END_TO_END = ["-m", "starquant", "verify-geodesic", "--family", "clifford", "--n", "3",
              "--samples", "0,0.3,1.0"]


def time_kernels(repeat):
    backends = kernels.available_backends()
    print(f"{'kernel':<22}{'dim':>5}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for n in (2, 3):
        p = np.ascontiguousarray(curve_eval(clifford_algebra(n)[1], 0.7))
        for kernel, args in (("associator", (p, p)), ("associator_jacobian", (p,)),
                             ("two_term_operator", (p,))):
            best = {}
            for name, impl in backends.items():
                fn = getattr(impl, kernel)
                number = 5 if p.shape[0] >= 8 else 50
                best[name] = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
            speedup = best["python"] / best["cython"] if "cython" in best else float("nan")
            cells = "".join(f"{best[name] * 1e3:>12.3f}ms" for name in backends)
            print(f"{kernel:<22}{p.shape[0]:>5}{cells}{speedup:>9.1f}x", flush=True)


def time_end_to_end():
    for name, env in (("cython", {}), ("python", {"STARQUANT_PURE_PYTHON": "1"})):
        if name == "cython" and kernels.compiled_impl is None:
            continue
        t = timeit.default_timer()
        subprocess.run([sys.executable, *END_TO_END], env={**os.environ, **env},
                       stdout=subprocess.DEVNULL, check=False)
        print(f"end-to-end verify Cliff(3) [{name}]: {timeit.default_timer() - t:.2f} s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-end-to-end", action="store_true")
    args = parser.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    time_kernels(args.repeat)
    if not args.skip_end_to_end:
        time_end_to_end()


if __name__ == "__main__":
    main()
