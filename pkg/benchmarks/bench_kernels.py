"""Time the JIT kernels against their pure-numpy reference versions.

Run:  python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is exercised at a representative problem size.  The numpy
path is what the library falls back to when numba is unavailable or
PERMOFDM_DISABLE_NUMBA is set; this script quantifies what that costs.
"""

import argparse
import itertools
import time

import numpy as np

from permofdm import JIT_ENABLED, QamConstellation
from permofdm._kernels import (
    brute_force_scan_numpy,
    demod_points_numpy,
    fisher_yates_numpy,
    greedy_assign_numpy,
)


def _time(fn, *args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _agree(a, b):
    """Outputs match: arrays/ints exactly, floats to rounding error."""
    ta = a if isinstance(a, tuple) else (a,)
    tb = b if isinstance(b, tuple) else (b,)
    for va, vb in zip(ta, tb):
        if isinstance(va, np.ndarray):
            if not np.array_equal(va, vb):
                return False
        elif isinstance(va, float) or isinstance(vb, float):
            if not np.isclose(va, vb, rtol=1e-12, atol=0):
                return False
        elif va != vb:
            return False
    return True


def workloads():
    rng = np.random.default_rng(0)
    const = QamConstellation.square(64)

    pts = const.points[rng.integers(0, 64, size=1_000_000)]
    noisy = pts + 0.05 * (rng.normal(size=pts.size) + 1j * rng.normal(size=pts.size))
    yield ("demod_points (1e6 symbols, 64-QAM)",
           "demod_points",
           (np.ascontiguousarray(noisy.real), np.ascontiguousarray(noisy.imag),
            const.levels_per_axis, const.bits_per_symbol // 2, const.scale))

    stream = rng.integers(0, 256, size=40_000, dtype=np.uint8)
    yield ("fisher_yates (size 4096 shuffle)",
           "fisher_yates",
           (stream, 4096))

    x = rng.normal(size=512) + 1j * rng.normal(size=512)
    y = x[rng.permutation(512)] + 0.01 * rng.normal(size=512)
    dist = np.abs(y[:, None] - x[None, :])
    yield ("greedy_assign (512 x 512 matching)",
           "greedy_assign",
           (dist, 1e-9))

    x8 = rng.normal(size=8) + 1j * rng.normal(size=8)
    y8 = x8[rng.permutation(8)]
    cands = np.array(list(itertools.permutations(range(8))), dtype=np.int64)
    yield ("brute_force_scan (8! = 40320 candidates)",
           "brute_force_scan",
           (cands, x8, y8))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repetitions; best of N is reported")
    args = ap.parse_args()

    if not JIT_ENABLED:
        print("JIT path is disabled (numba missing or PERMOFDM_DISABLE_NUMBA "
              "set); nothing to compare.")
        return

    from permofdm import _kernels

    numpy_fns = {
        "demod_points": demod_points_numpy,
        "fisher_yates": fisher_yates_numpy,
        "greedy_assign": greedy_assign_numpy,
        "brute_force_scan": brute_force_scan_numpy,
    }

    header = f"{'kernel':44s} {'numpy':>10s} {'jit':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, name, work in workloads():
        jit_fn = getattr(_kernels, name + "_jit")
        jit_fn(*work)  # compile outside the timed region
        t_np, out_np = _time(numpy_fns[name], *work, repeat=args.repeat)
        t_jit, out_jit = _time(jit_fn, *work, repeat=args.repeat)
        same = _agree(out_np, out_jit)
        flag = "" if same else "  RESULTS DIFFER!"
        print(f"{label:44s} {t_np * 1e3:8.2f}ms {t_jit * 1e3:8.2f}ms "
              f"{t_np / t_jit:7.1f}x{flag}")


if __name__ == "__main__":
    main()
