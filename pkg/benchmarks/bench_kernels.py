"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat 3]

Each workload is run on both backends, the outputs are compared, and the
best wall time of ``--repeat`` runs is reported."""

import argparse
import math
import time
from fractions import Fraction

from quaddyn import kernels
from quaddyn import known_values as kv
from quaddyn.dynamics import QuadRatMap, local_gcd_bound, sharp_constant
from quaddyn.rat_search import rationals_up_to


def _scan_args(phi, H):
    Cs, _ = sharp_constant(phi)
    MC = int(math.floor(math.exp(Cs))) + 1
    primes = [(p, e) for p, e in local_gcd_bound(phi).items() if e > 0]
    return phi.F, phi.G, min(H, MC), MC, primes


def workloads():
    rats = [(v.numerator, v.denominator) for v in rationals_up_to(12)]
    third = Fraction(-1, 3)
    yield "poly_screen n=60..71, N_max=10", lambda k: [k.poly_screen(n, 10, True) for n in range(60, 72)]
    yield f"rat_screen x3=-1/3, {len(rats)} values (H=12)", \
        lambda k: k.rat_screen((third.numerator, third.denominator), rats, 0.002, 1e-9)
    seven = _scan_args(QuadRatMap(*kv.SEVEN_CYCLE_MAP), 1000)
    yield "preper_scan seven-cycle map, H=1000", lambda k: k.preper_scan(*seven, 50)
    F, G, *_ = kv.LENGTH_EIGHT_ORBITS[0]
    eight = _scan_args(QuadRatMap(F, G), 400)
    yield "preper_scan length-8 map 1, H=400", lambda k: k.preper_scan(*eight, 50)


def best_time(fn, backend, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args(argv)
    py = kernels.get_backend("python")
    try:
        compiled = kernels.get_backend("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'workload':<48} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for name, fn in workloads():
        tc, oc = best_time(fn, compiled, opts.repeat)
        tp, op = best_time(fn, py, opts.repeat)
        if oc != op:
            print(f"{name}: backends disagree")
            return 1
        print(f"{name:<48} {tc:>9.3f}s {tp:>9.3f}s {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
