"""Benchmark the compiled kernel core against the numpy fallback.

Times the hot kernels at benchmark sizes plus one end-to-end CG solve per
backend. Run from the repository root:

    python benchmarks/bench_kernels.py [--n 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from defcg import _kernels


def best_of(repeats, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def make_problem(n, d, seed=0):
    rng = np.random.default_rng(seed)
    x = np.ascontiguousarray(rng.standard_normal((n, d)))
    a = None
    return x, rng


def run(n, repeats):
    backends = {}
    backends["numpy"] = _kernels.load_backend("numpy")
    try:
        backends["compiled"] = _kernels.load_backend("compiled")
    except ImportError:
        print("compiled core not built; benchmarking the numpy fallback only")

    d = 5
    rng = np.random.default_rng(0)
    x = np.ascontiguousarray(rng.standard_normal((n, d)))
    v = rng.standard_normal(n)
    w = np.ascontiguousarray(rng.standard_normal((n, 8)))
    small = rng.standard_normal((200, 200))
    small = np.ascontiguousarray(small @ small.T + 200.0 * np.eye(200))

    # one SPD matrix reused by matvec/gemm/cholesky
    ref = backends["numpy"]
    gram = ref.rbf_gram(x, 64.0, 1.0 / (2.0 * 1.5**2), 64.0e-8)
    idx = np.arange(n)
    gram[idx, idx] += 1.0

    rows = []
    for name, impl in backends.items():
        timings = {}
        timings["rbf_gram"], _ = best_of(repeats, impl.rbf_gram, x, 64.0, 1.0 / 4.5, 1e-8)
        timings["matvec"], _ = best_of(repeats, impl.matvec, gram, v)
        timings["gemm_nxk"], _ = best_of(repeats, impl.gemm, gram, w)
        timings["cholesky"], _ = best_of(max(1, repeats // 2), impl.cholesky, gram, 0.0)

        a_small = small.copy()
        v_small = np.eye(200)
        timings["jacobi_sweep"], _ = best_of(1, impl.jacobi_sweep, a_small, v_small)

        def cg(a, b):
            xk = np.zeros(len(b))
            r = b - impl.matvec(a, xk)
            p = r.copy()
            rr = r @ r
            for _ in range(100):
                ap = impl.matvec(a, p)
                alpha = rr / (p @ ap)
                xk += alpha * p
                r -= alpha * ap
                rr_new = r @ r
                p = r + (rr_new / rr) * p
                rr = rr_new
            return xk

        timings["cg_100_iter"], _ = best_of(max(1, repeats // 2), cg, gram, v)
        rows.append((name, timings))

    kernels = ["rbf_gram", "matvec", "gemm_nxk", "cholesky", "jacobi_sweep", "cg_100_iter"]
    header = f"{'kernel':<14}" + "".join(f"{name:>14}" for name, _ in rows)
    if len(rows) == 2:
        header += f"{'ratio':>10}"
    print(f"n = {n}, d = {d}, k = 8, jacobi at 200x200; best of {repeats}")
    print(header)
    print("-" * len(header))
    for kernel in kernels:
        line = f"{kernel:<14}"
        values = []
        for _, timings in rows:
            values.append(timings[kernel])
            line += f"{timings[kernel] * 1e3:>12.2f}ms"
        if len(values) == 2:
            line += f"{values[0] / values[1]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    run(args.n, args.repeats)
