"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once first so numba compilation stays out of the timings.
"""

import argparse
import timeit

import numpy as np

from qmaps import _kernels as K
from qmaps.so3 import haar_spoints


def cases(rng):
    h = rng.normal(size=(24, 24)) + 1j * rng.normal(size=(24, 24))
    h = h + h.conj().T
    p = haar_spoints(100_000, 1)
    r = haar_spoints(100_000, 2)
    mats = [rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)) for _ in range(3)]
    x = rng.normal(size=12**3) + 0j
    return {
        "jacobi_eigh 24x24": lambda b: K.jacobi_eigh(h, backend=b),
        "s_mul_batch 1e5": lambda b: K.s_mul_batch(p, r, backend=b),
        "s_inv_batch 1e5": lambda b: K.s_inv_batch(p, backend=b),
        "kron_apply 12^3": lambda b: K.kron_apply(mats, x, backend=b),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if K.HAVE_NUMBA else [])
    print(f"default backend: {K.BACKEND}")
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends) + "   max |diff|")
    for name, fn in cases(np.random.default_rng(0)).items():
        outs, times = {}, {}
        for b in backends:
            outs[b] = fn(b)
            times[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        ref = outs["numpy"]
        ref = ref[0] if isinstance(ref, tuple) else ref
        diff = 0.0
        for b in backends[1:]:
            got = outs[b][0] if isinstance(outs[b], tuple) else outs[b]
            diff = max(diff, float(np.abs(got - ref).max()))
        print(f"{name:<20}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends) + f"   {diff:.1e}")


if __name__ == "__main__":
    main()
