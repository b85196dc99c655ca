"""Timing comparison of the vertex enumeration kernels.

Runs the compiled and pure-Python kernels on the constraint systems the
security analysis actually produces (22 rows, 4 unknowns) plus random
cut boxes, and reports per-call times.  Usage:

    python3 benchmarks/bench_polytope.py [--repeats N]
"""

import argparse
import time

import numpy as np

from rfiqkd._vertex_py import enumerate_vertices as py_kernel
from rfiqkd.channel import ChannelParams, single_photon_yields
from rfiqkd.polytope import _dedup
from rfiqkd.security import build_inequality_system
from rfiqkd.source import STATE_LABELS, SourceSpec, build_coefficients

try:
    from rfiqkd._vertex_cy import enumerate_vertices as cy_kernel
except ImportError:
    cy_kernel = None


def security_system():
    spec = SourceSpec(delta_im1=0.05, delta_im2=-0.03, delta_pm1=0.3,
                      theta=1e-3, gamma=1e-6)
    coeffs = build_coefficients(spec)
    table = single_photon_yields(coeffs.states, ChannelParams(50.0))
    yields = {label: (table[(label, "X", 0)],) * 2 for label in STATE_LABELS}
    return build_inequality_system(coeffs, yields)


def random_system(rng, extra_rows):
    a = rng.normal(size=(extra_rows, 4))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = a @ rng.uniform(-0.4, 0.4, size=4) + rng.uniform(0.25, 1.0, extra_rows)
    box = np.vstack([np.eye(4), -np.eye(4)])
    return np.vstack([box, a]), np.concatenate([np.full(8, 1.5), b])


def time_kernel(kernel, A, b, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        raw = kernel(A, b, 1e-12)
        best = min(best, time.perf_counter() - t0)
    return best, _dedup(np.asarray(raw))


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repetitions per system (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(5)
    cases = [("security 22x4", *security_system()),
             ("random 16x4", *random_system(rng, 8)),
             ("random 28x4", *random_system(rng, 20))]

    print(f"{'system':<16} {'vertices':>8} {'python':>12} {'cython':>12} "
          f"{'speedup':>8}")
    for name, A, b in cases:
        t_py, v_py = time_kernel(py_kernel, A, b, args.repeats)
        if cy_kernel is None:
            print(f"{name:<16} {len(v_py):>8} {t_py * 1e3:>10.3f}ms "
                  f"{'n/a':>12} {'n/a':>8}")
            continue
        t_cy, v_cy = time_kernel(cy_kernel, A, b, args.repeats)
        if v_py.shape != v_cy.shape or not np.allclose(v_py, v_cy, atol=1e-9):
            raise RuntimeError(f"kernel mismatch on {name}")
        print(f"{name:<16} {len(v_py):>8} {t_py * 1e3:>10.3f}ms "
              f"{t_cy * 1e3:>10.3f}ms {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
