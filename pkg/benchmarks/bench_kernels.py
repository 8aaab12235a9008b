"""Time the displacement kernels under both backends.

    python benchmarks/bench_kernels.py [--points 128] [--repeat 5]

The numba timings exclude the first (compiling) call.
"""
import argparse
import time

import numpy as np

from qruler import _accel, fock
from qruler.phase_space import Grid2D


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    pts = Grid2D(6.0, args.points).complex_points()
    jobs = {
        "contract vacuum": (fock.vacuum(60), fock.vacuum(60)),
        "contract n=5": (fock.number_state(5, 60), fock.number_state(5, 60)),
        "contract sq(0.25)": (fock.squeezed_vacuum(0.25), fock.squeezed_vacuum(0.25)),
    }
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    _accel.configure_threads()
    threads = _accel.numba.get_num_threads() if _accel.HAVE_NUMBA else 1
    print(f"grid {args.points}x{args.points}, best of {args.repeat}, numba threads: {threads}")
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'max |diff|':>14}")
    for name, (a, b) in jobs.items():
        a, b = a.support(), b.support()
        row, outs = [], []
        for be in backends:
            fn = lambda: _accel.contract_displacement(pts, a, b, backend=be)
            outs.append(fn())
            row.append(best_of(fn, args.repeat))
        diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
        print(f"{name:<24}" + "".join(f"{t * 1e3:>10.1f}ms" for t in row) + f"{diff:>14.1e}")

    few = pts[::8, ::8]
    row = []
    for be in backends:
        fn = lambda: _accel.displacement_elements(few, 40, 40, backend=be)
        fn()
        row.append(best_of(fn, args.repeat))
    print(f"{'elements 40x40':<24}" + "".join(f"{t * 1e3:>10.1f}ms" for t in row))


if __name__ == "__main__":
    main()
