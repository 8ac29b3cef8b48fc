"""Time the compiled Poisson kernel against the pure-numpy fallback.

Both backends are driven through the public model entry point on identical
seeds, so the comparison covers exactly what users run. Output equality is
asserted bit for bit on every case; the table reports throughput and speedup.

Usage:
    python3 benchmarks/bench_kernels.py [--side 1024] [--repeats 3]
"""

import argparse
import time

import numpy as np

from pgnoise import _kernels, streams
from pgnoise.model import ChannelParams, ImagePlane, add_noise_plane


def _constant(side, y):
    return ImagePlane.constant(side, side, y)


def _ramp(side):
    row = np.linspace(0.12, 0.88, side)
    return ImagePlane(np.tile(row, (side, 1)))


# (label, a, b, clean-plane builder). Cases cover the zero-gain Gaussian
# path, the exact inversion branch at small and near-threshold means, the
# normal-approximation branch, and a ramp that mixes both branches.
CASES = (
    ("gaussian only (a=0)", 0.0, 3e-3, lambda side: _constant(side, 0.5)),
    ("exact branch, lam=200", 5e-4, 3e-3, lambda side: _constant(side, 0.1)),
    ("exact branch, lam~1000", 5e-4, 3e-3, lambda side: _constant(side, 0.4999)),
    ("approx branch, lam=9000", 1e-4, 3e-3, lambda side: _constant(side, 0.9)),
    ("mixed ramp, lam 600..4400", 2e-4, 3e-3, lambda side: _ramp(side)),
)


def _time_once(backend, clean, params, seed):
    _kernels.set_backend(backend)
    t0 = time.perf_counter()
    noisy = add_noise_plane(clean, params, streams.generator(seed), clip=False)
    return time.perf_counter() - t0, noisy.pixels


def _best_of(repeats, backend, clean, params, seed):
    best = float("inf")
    pixels = None
    for _ in range(repeats):
        elapsed, pixels = _time_once(backend, clean, params, seed)
        best = min(best, elapsed)
    return best, pixels


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare kernel backends on identical noise workloads")
    parser.add_argument("--side", type=int, default=1024,
                        help="square plane side length in pixels (default 1024)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per case, best kept (default 3)")
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    if "compiled" not in backends:
        print("compiled backend unavailable (extension not built); "
              "timing numpy only")
    original = _kernels.active_backend()

    mpx = args.side * args.side / 1e6
    header = f"{'case':<28} {'numpy':>10} {'compiled':>10} {'speedup':>8}"
    print(f"plane {args.side}x{args.side} ({mpx:.1f} Mpx), "
          f"best of {args.repeats}")
    print(header)
    print("-" * len(header))
    try:
        for i, (label, a, b, build) in enumerate(CASES):
            clean = build(args.side)
            params = ChannelParams(a=a, b=b)
            t_np, px_np = _best_of(args.repeats, "numpy", clean, params, 1000 + i)
            if "compiled" in backends:
                t_c, px_c = _best_of(args.repeats, "compiled", clean, params,
                                     1000 + i)
                if not np.array_equal(px_np, px_c):
                    raise AssertionError(
                        f"{label}: backends disagree bit-for-bit")
                print(f"{label:<28} {mpx / t_np:>7.1f} Mpx/s "
                      f"{mpx / t_c:>7.1f} Mpx/s {t_np / t_c:>7.2f}x")
            else:
                print(f"{label:<28} {mpx / t_np:>7.1f} Mpx/s {'-':>10} {'-':>8}")
    finally:
        _kernels.set_backend(original)
    print("ok: outputs bit-identical across backends"
          if "compiled" in backends else "done")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
