"""Compare the compiled and pure-Python Jacobi kernels.

    python3 benchmarks/bench_eig.py --dims 4 8 16 32 64 --repeat 5
"""

import argparse
import time

import numpy as np

from biortho import _backend, tensor


def time_kernel(name, h, repeat):
    _backend.kernel = _backend.KERNELS[name]
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        w, v = tensor.hermitian_eig(h)
        best = min(best, time.perf_counter() - t0)
    err = np.linalg.norm((v * w) @ v.conj().T - h) / np.linalg.norm(h)
    return best, err


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    names = sorted(_backend.KERNELS)
    original = _backend.kernel
    print(f"{'dim':>5}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    try:
        for n in args.dims:
            h = tensor.random_hermitian(n, rng)
            times = {}
            for name in names:
                t, err = time_kernel(name, h, args.repeat)
                assert err < 1e-10, (name, n, err)
                times[name] = t
            row = f"{n:>5}" + "".join(f"{times[k] * 1e3:>16.3f}" for k in names)
            if "compiled" in times:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)
    finally:
        _backend.kernel = original
    if "compiled" not in names:
        print("compiled kernel not built; only the Python fallback was timed")


if __name__ == "__main__":
    main()
