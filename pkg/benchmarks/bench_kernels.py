"""Compare the compiled and pure-Python difference-quotient scans.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case runs phi_sup over every (j+1)-subset of R_probe with both
implementations, checks that value and witness agree, and reports the best
wall time of ``--repeat`` runs.
"""

import argparse
import math
import random
import time

from wavelet_cn import Backend, CnCombo, FieldParams, enumerate_reps, kernels
from wavelet_cn.bruteforce import _value_precision, phi_sup, probe_table

QUICK = [
    # backend, p, level, depth, probe
    ("zp", 2, 2, 1, 4),
    ("zp", 3, 2, 1, 3),
    ("fpt", 3, 2, 1, 3),
]
CASES = [
    ("zp", 2, 3, 2, 5),
    ("zp", 3, 2, 1, 4),
    ("zp", 5, 2, 1, 3),
    ("fpt", 2, 1, 2, 7),
    ("fpt", 3, 2, 1, 4),
    ("fpt", 5, 2, 1, 3),
]

def best_time(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small cases only")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    if not kernels.COMPILED:
        print("compiled kernels are not built; only the pure-Python timings are shown")
    print(f"{'case':<28}{'tuples':>10}{'pure s':>10}{'compiled s':>12}{'speedup':>9}")
    for backend, p, n, depth, probe in (QUICK if args.quick else CASES):
        P = FieldParams(Backend(backend), p, 40)
        f = CnCombo.random(P, n, depth, random.Random(0), density=0.6, max_val=1)
        pts = enumerate_reps(p, probe)
        values = [f(x) for x in pts]
        table = probe_table(P, probe, _value_precision(values, P))
        run = lambda impl: phi_sup(f, n, pts, impl=impl, table=table, values=values, threads=args.threads)
        t_pure, r_pure = best_time(lambda: run(kernels.pure), args.repeat)
        label = f"{backend} p={p} n={n} R_{probe}"
        tuples = math.comb(len(pts), n + 1)
        if kernels.COMPILED:
            t_comp, r_comp = best_time(lambda: run(kernels.compiled), args.repeat)
            assert (r_pure.value, r_pure.witness) == (r_comp.value, r_comp.witness), label
            print(f"{label:<28}{tuples:>10}{t_pure:>10.3f}{t_comp:>12.4f}{t_pure / t_comp:>8.0f}x")
        else:
            print(f"{label:<28}{tuples:>10}{t_pure:>10.3f}{'-':>12}{'-':>9}")


if __name__ == "__main__":
    main()
