"""Benchmark the compiled kernels against the NumPy fallback.

Run as `python -m reglue.benchmark`.  Imports both backends directly (not
through the import-time selector) and times the hot operations on sized
workloads.
"""

from __future__ import annotations

import time

import numpy as np

from . import _kernels_py


def _load_compiled():
    try:
        from . import _kernels
        return _kernels
    except ImportError:
        return None


def _time(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(width=600, height=600, scan_len=2_000_000, diam_pts=4000):
    compiled = _load_compiled()
    rows = []

    xs = np.linspace(-3.5, 3.5, width)
    ys = np.linspace(-2.5, 2.5, height)
    rng = np.random.default_rng(7)
    theta = np.linspace(0, 6 * np.pi, scan_len)
    g = (2.0 + np.cos(theta)) * np.exp(1j * theta)
    pts = rng.standard_normal(diam_pts) + 1j * rng.standard_normal(diam_pts)
    pts2 = pts + 3.0

    cases = [
        ("escape_counts 600x600x200",
         lambda k: k.escape_counts(xs, ys, -6.0, 0.0, 14.0, 200)),
        ("sqrt_continue_scan 2e6",
         lambda k: k.sqrt_continue_scan(g, np.sqrt(g[0]), 1.05, 1e-10)),
        ("max_pair_chordal 4000",
         lambda k: k.max_pair_chordal(pts)),
        ("min_cross_chordal 4000x4000",
         lambda k: k.min_cross_chordal(pts, pts2)),
    ]

    print(f"{'kernel':<32} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for name, call in cases:
        t_py, out_py = _time(call, _kernels_py)
        if compiled is not None:
            t_cy, out_cy = _time(call, compiled)
            _check_close(name, out_py, out_cy)
            print(f"{name:<32} {t_py*1e3:>8.1f}ms {t_cy*1e3:>8.1f}ms "
                  f"{t_py/t_cy:>7.1f}x")
        else:
            print(f"{name:<32} {t_py*1e3:>8.1f}ms {'n/a':>10} {'':>8}")
        rows.append(name)
    if compiled is None:
        print("\ncompiled extension not available; install with the Cython "
              "build to compare")
    return rows


def _check_close(name, a, b):
    if isinstance(a, tuple):
        ok = np.allclose(a[0], b[0], atol=1e-9) and a[1:] == b[1:]
    else:
        ok = np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                         atol=1e-9)
    if not ok:
        raise AssertionError(f"backend mismatch in {name}")


if __name__ == "__main__":
    run()
