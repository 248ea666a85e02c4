"""Time the numba and numpy variants of each hot kernel on identical inputs.

    python3 benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]

Numba timings exclude the first (compiling) call.  Outputs are compared
before timing, so a row is only printed for kernels that agree.
"""
import argparse
import time

import numpy as np

from p2lab import _accel, kernels, localroots, ntcore, sievelab
from p2lab.polyform import QuadraticPoly, shift_to_G


def best_of(fn, repeat):
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t)
    return min(ts)


def cases(scale):
    N = int(10**6 * scale)
    g = QuadraticPoly(1, 0, 1)
    G = shift_to_G(g)
    base = ntcore.primes_up_to(int(N**0.5) + 2).primes
    primes = ntcore.primes_up_to(N).primes

    spf = kernels.spf_table_np(N)
    ctx = localroots._spf_context(N)
    local = localroots._good_local_table(
        g, ctx[2], ctx[3], lambda chi, k: [1] + [1 + chi] * k, lambda P, p, k: localroots.rho_p(P, p, k) if k else 1)

    x = int(2 * 10**5 * scale)
    q = g
    B = sievelab.default_bound(g, x)
    progs = sievelab.root_progressions(g, B, sievelab._max_abs_value(q, x))

    def state():
        rem = kernels.poly_values(q.a, q.b, q.c, 1, x + 1)
        z = lambda: np.zeros(x, dtype=np.int64)
        return rem, z(), z(), z(), np.ones(x, dtype=np.bool_)

    def sieve_full(apply, classify):
        def run():
            st = state()
            apply(1, *st, *progs)
            classify(*st, B)
            return st
        return run

    vals = np.array([G(n) for n in range(10**6, 10**6 + int(2000 * scale))], dtype=np.int64)

    def fb(impl):
        def run():
            out = np.zeros((vals.size, kernels.FACTOR_WIDTH), dtype=np.int64)
            impl(vals, out)
            return out
        return run

    def dde(impl, step=1e-3):
        d = round(1 / step)
        n = 8 * d + 1

        def run():
            u = np.full(n, 2 * 1.781072417990198)
            v = np.zeros(n)
            impl(u, v, step, d, 3 * d, 2 * d, 2 * d)
            return u, v
        return run

    hs = np.arange(1, 21, dtype=np.int64)
    s = 7919
    yield "sieve_segment", (lambda impl: lambda: impl(N, 2 * N, base)), \
        kernels.sieve_segment_nb, kernels.sieve_segment_np
    yield "spf_table", (lambda impl: lambda: impl(N)), kernels.spf_table_nb, kernels.spf_table_np
    yield "multiplicative", (lambda impl: lambda: impl(N, spf, ctx[1], local)), \
        kernels.multiplicative_nb, kernels.multiplicative_np
    yield "legendre", (lambda impl: lambda: impl(-4, primes)), kernels.legendre_nb, kernels.legendre_np
    yield "progressions+cofactors", (lambda pair: sieve_full(*pair)), \
        (kernels.apply_progressions_nb, kernels.classify_cofactors_nb), \
        (kernels.apply_progressions_np, kernels.classify_cofactors_np)
    yield "factor_batch", fb, kernels.factor_batch_nb, kernels.factor_batch_np
    yield "kloosterman", (lambda impl: lambda: impl(hs, s, 0, s + 1, 0, 1)), \
        kernels.kloosterman_nb, kernels.kloosterman_np
    yield "dde_loop", dde, kernels.dde_loop_nb, kernels.dde_loop_np


def same(a, b):
    if isinstance(a, tuple):
        return all(same(u, v) for u, v in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=1e-12, atol=1e-12)
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<24}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, make, nb, np_ in cases(args.scale):
        f_nb, f_np = make(nb), make(np_)
        if not same(f_nb(), f_np()):
            print(f"{name:<24} outputs differ")
            continue
        t_nb = best_of(f_nb, args.repeat)
        t_np = best_of(f_np, args.repeat)
        print(f"{name:<24}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
