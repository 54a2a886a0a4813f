"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py
The same workloads run on both backends (first numba call is compiled
outside the timed region); workloads mirror the hot paths of a spectrum
scan: fine-stepped propagation of small Hermitian stacks and long chains
of cached segment unitaries.
"""

from __future__ import annotations

import time

import numpy as np

from ddshape import kernels
from ddshape.quantum import expm_hermitian

RNG = np.random.default_rng(42)


def hermitian_stack(n: int, dim: int, scale: float) -> np.ndarray:
    a = RNG.normal(size=(n, dim, dim)) + 1j * RNG.normal(size=(n, dim, dim))
    return scale * (a + a.conj().transpose(0, 2, 1)) / 2.0


def timeit(fn, repeats: int = 5) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    backends = ["numpy"] + (["numba"] if kernels.NUMBA_AVAILABLE else [])
    workloads = []

    # shaped-pulse unitary: ~8k steps on the NV + two-nucleus space (8x8)
    hs_pulse = hermitian_stack(8000, 8, 4e8)
    dts_pulse = np.full(8000, 6e-11)
    workloads.append(
        ("propagate 8000 x 8x8", lambda b: kernels.propagate_steps(hs_pulse, dts_pulse, backend=b))
    )

    # classical-signal run: ~40k steps on the bare qubit (2x2)
    hs_cl = hermitian_stack(40000, 2, 5e7)
    dts_cl = np.full(40000, 7e-10)
    workloads.append(
        ("propagate 40000 x 2x2", lambda b: kernels.propagate_steps(hs_cl, dts_cl, backend=b))
    )

    # sequence assembly: 2881-segment chain over four cached unitaries (8x8)
    mats = np.stack([expm_hermitian(h, 1e-9) for h in hermitian_stack(4, 8, 4e8)])
    order = RNG.integers(0, 4, size=2881).astype(np.int64)
    workloads.append(
        ("chain 2881 x 8x8", lambda b: kernels.chain_product(mats, order, backend=b))
    )

    if kernels.NUMBA_AVAILABLE:  # compile outside the timed region
        for _, fn in workloads:
            fn("numba")

    print(f"{'workload':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workloads:
        times = {b: timeit(lambda: fn(b)) for b in backends}
        row = f"{name:<24}" + "".join(f"{times[b] * 1e3:>10.2f} ms" for b in backends)
        if "numba" in times:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
