"""Time the compiled and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py --N 8 16 32 --repeat 5
"""

import argparse
import timeit

import numpy as np

from nlsflow import kernels
from nlsflow.measures import MeasureSpec, sample_mu_alpha
from nlsflow.solver import cubic_array


def best_of(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, nargs="+", default=[8, 16, 32])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not available; only the numpy fallback is timed")
    print(f"{'kernel':<16}{'N':>4}" + "".join(f"{name:>14}" for name in impls) + f"{'speedup':>10}")
    for N in args.N:
        c = np.ascontiguousarray(sample_mu_alpha(MeasureSpec(0.8, N, seed=0), 0).coeffs)
        for kernel, call in (
            ("direct_cubic", lambda m: m.direct_cubic(c, N)),
            ("nonresonant_sum", lambda m: m.nonresonant_sum(c, N, 0.8, 0.5, 0.1)),
        ):
            times = {name: best_of(lambda m=m: call(m), args.repeat) for name, m in impls.items()}
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            cells = "".join(f"{times[name] * 1e6:>12.1f}us" for name in impls)
            print(f"{kernel:<16}{N:>4}{cells}{speed:>9.1f}x")
        fft = best_of(lambda: cubic_array(c, 4 * N + 2), args.repeat)
        print(f"{'fft_cubic':<16}{N:>4}{fft * 1e6:>12.1f}us  (reference)")


if __name__ == "__main__":
    main()
