"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Also times one full Monte Carlo trial per scheme under each backend.
"""

import argparse
import timeit

import numpy as np

from hybridsec import _pykernels
from hybridsec.channel import SystemConfig
from hybridsec.montecarlo import EnsembleSpec, _run_chunk
from hybridsec.precoder import Scheme

try:
    from hybridsec import _ckernels
except ImportError:
    _ckernels = None


def inputs(n=128, k=3, cols=7, seed=0):
    g = np.random.default_rng(seed)
    H = (g.standard_normal((n, k)) + 1j * g.standard_normal((n, k))) * np.sqrt(0.375)
    Q, _ = np.linalg.qr(H)
    A0 = np.exp(2j * np.pi * g.random((n, cols))) / np.sqrt(n)
    X = g.standard_normal((n, 10)) + 1j * g.standard_normal((n, 10))
    return H, Q, A0, X


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def trial_time(kernels, scheme, repeat):
    import hybridsec._backend as backend

    saved = backend.phase_project, backend.ins_solve
    backend.phase_project, backend.ins_solve = kernels.phase_project, kernels.ins_solve
    try:
        spec = EnsembleSpec(SystemConfig(), scheme, 1, 0)
        return best_of(lambda: _run_chunk(spec, 0, 1), repeat)
    finally:
        backend.phase_project, backend.ins_solve = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    H, Q, A0, X = inputs()
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled extension not built; timing the fallback only")
    rows = []
    for name, mod in impls:
        rows.append((name, "phase_project 128x10", best_of(lambda: mod.phase_project(X, 0.1), args.repeat)))
        rows.append((name, "ins_solve N=128 K=3 x7", best_of(lambda: mod.ins_solve(H, Q, A0, 1e-6, 500), args.repeat)))
        for scheme in (Scheme.ANA, Scheme.HZF):
            rows.append((name, f"trial {scheme} N=128", trial_time(mod, scheme, max(20, args.repeat // 4))))
    print(f"{'backend':<8} {'kernel':<26} {'best (ms)':>10}")
    for name, what, t in rows:
        print(f"{name:<8} {what:<26} {1e3 * t:>10.4f}")
    if _ckernels:
        by = {(n, w): t for n, w, t in rows}
        print()
        for _, what, _ in rows[: len(rows) // 2]:
            print(f"speedup {what:<26} {by['python', what] / by['cython', what]:6.1f}x")


if __name__ == "__main__":
    main()
