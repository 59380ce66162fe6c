"""Time the compiled sieve kernel against the pure-Python fallback.

    python3 benchmarks/bench_sieve.py [--a-box 2000] [--primes 40] [--degree 12]

Both kernels run the same rounds; the masks are compared for equality.
"""

from __future__ import annotations

import argparse
import time

from explicit_mordell.cli_reports import find_curve
from explicit_mordell.curve_families import IntPoly, cyclotomic
from explicit_mordell.sieve_search import (
    _round_mask,
    _sieve_primes,
    available_kernels,
    select_kernel,
)


def run(kernel_name, E, g, poly, a_box, primes):
    kernel = select_kernel(kernel_name)
    t0 = time.perf_counter()
    masks = [_round_mask(kernel, E, g, [E.infinity], poly, a_box, p) for p in primes]
    return time.perf_counter() - t0, masks


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--curve", default="E1")
    ap.add_argument("--a-box", type=int, default=2000)
    ap.add_argument("--primes", type=int, default=40)
    ap.add_argument("--degree", type=int, default=12)
    args = ap.parse_args()

    rec = find_curve(args.curve)
    E, g = rec.curve, rec.generator_point
    it = _sieve_primes(E, g, args.a_box + 1)
    primes = [next(it) for _ in range(args.primes)]
    kernels = available_kernels()
    print(f"curve {args.curve}, a_box {args.a_box}, {len(primes)} primes from {primes[0]}, kernels {kernels}")

    for label, poly in (("x^n", IntPoly((0,) * args.degree + (1,))), ("Phi_n", cyclotomic(args.degree))):
        results = {name: run(name, E, g, poly, args.a_box, primes) for name in kernels}
        line = f"{label:6} n={args.degree}: " + ", ".join(f"{k} {t:.3f}s" for k, (t, _) in results.items())
        if len(results) == 2:
            (tc, mc), (tp, mp) = results["compiled"], results["python"]
            same = all((a == b).all() for a, b in zip(mc, mp))
            line += f", speedup {tp / tc:.1f}x, masks {'identical' if same else 'DIFFER'}"
        print(line)


if __name__ == "__main__":
    main()
