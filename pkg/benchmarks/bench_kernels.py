"""Compare the numba and numpy jet kernels.

    python3 benchmarks/bench_kernels.py [--points 1681] [--repeat 5]

Times the truncated product and series composition at the jet orders the
library uses (3, 4, 6), then one full invariant-suite run per backend.  The
two backends are also checked to agree.
"""

import argparse
import time

import numpy as np

from isothermic import _kernels
from isothermic.dupin import preset_surface
from isothermic.verify import run_checks


def best_of(fn, repeat):
    fn()  # warm-up (and numba compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def random_jet(rng, K, n):
    c = rng.standard_normal((K + 1, K + 1, n))
    return c * _kernels._triangle_mask(K)[:, :, None]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=41 * 41)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'K':>3}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for K in (3, 4, 6):
        a, b = random_jet(rng, K, args.points), random_jet(rng, K, args.points)
        delta = b.copy()
        delta[0, 0] = 0.0
        fk = rng.standard_normal((K + 1, args.points))
        for name, np_fn, nb_fn in (
            ("mul", lambda: _kernels.mul_numpy(a, b, K), lambda: _kernels.mul_numba(a, b, K)),
            ("compose", lambda: _kernels.compose_numpy(fk, delta, K), lambda: _kernels.compose_numba(fk, delta, K)),
        ):
            assert np.allclose(np_fn(), nb_fn(), rtol=1e-13, atol=1e-13)
            t_np, t_nb = best_of(np_fn, args.repeat), best_of(nb_fn, args.repeat)
            print(f"{name:<12}{K:>3}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}")

    spec = preset_surface("ex1-a")
    suite = {}
    for backend in ("numpy", "numba"):
        previous = _kernels.set_backend(backend)
        try:
            suite[backend] = best_of(lambda: run_checks(spec, (41, 41)), max(1, args.repeat // 2))
        finally:
            _kernels.set_backend(previous)
    print(f"\nfull suite on ex1-a 41x41: numpy {suite['numpy']:.3f} s, numba {suite['numba']:.3f} s")


if __name__ == "__main__":
    main()
