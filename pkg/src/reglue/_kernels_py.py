"""Pure NumPy implementations of the hot kernels.

Mirrors the API of the compiled module ``reglue._kernels``; one of the two is
selected at import time by :mod:`reglue._backend`.  Keep the arithmetic here
in the same order as the Cython code so both backends agree bit-for-bit on
escape counts and branch-sign decisions away from exact ties.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def escape_counts(xs, ys, cre, cim, radius, max_iter):
    """Escape iteration counts for z^2+c over a pixel grid.

    xs, ys: 1-D float64 arrays of pixel-center coordinates.
    Returns an int32 array of shape (len(ys), len(xs)); -1 marks points that
    never left |z| > radius within max_iter steps, 0 marks points starting
    outside already.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    Z = xs[None, :] + 1j * ys[:, None]
    c = complex(cre, cim)
    r2 = float(radius) * float(radius)
    counts = np.full(Z.shape, -1, dtype=np.int32)
    escaped0 = Z.real * Z.real + Z.imag * Z.imag > r2
    counts[escaped0] = 0
    alive = ~escaped0
    for k in range(1, max_iter + 1):
        Z[alive] = Z[alive] * Z[alive] + c
        esc = alive & (Z.real * Z.real + Z.imag * Z.imag > r2)
        counts[esc] = k
        alive &= ~esc
        if not alive.any():
            break
    return counts


def attraction_counts(xs, ys, are, aim, bre, bim, cyc, tol, max_iter):
    """Steps until the orbit under (az^2-b)/(z^2-1) comes within chordal
    distance tol of the attracting cycle ``cyc`` (complex array).

    Returns int32 array; -1 = never attracted.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    a = complex(are, aim)
    b = complex(bre, bim)
    cyc = np.asarray(cyc, dtype=np.complex128)
    Z = xs[None, :] + 1j * ys[:, None]
    counts = np.full(Z.shape, -1, dtype=np.int32)
    alive = np.ones(Z.shape, dtype=bool)
    tol2 = float(tol) * float(tol)
    for k in range(max_iter + 1):
        # chordal^2 distance from Z to each cycle point
        zz = Z[alive]
        if zz.size:
            q = 1.0 + zz.real * zz.real + zz.imag * zz.imag
            near = np.zeros(zz.shape, dtype=bool)
            for p in cyc:
                pp = 1.0 + p.real * p.real + p.imag * p.imag
                d2 = 4.0 * np.abs(zz - p) ** 2 / (q * pp)
                near |= d2 < tol2
            idx = np.where(alive)
            hit = (idx[0][near], idx[1][near])
            counts[hit] = k
            sub = np.zeros(Z.shape, dtype=bool)
            sub[hit] = True
            alive &= ~sub
        if k == max_iter or not alive.any():
            break
        zz = Z[alive]
        w2 = zz * zz
        den = w2 - 1.0
        # points exactly at +-1 blow up; substitute a huge value (maps near a next step)
        den = np.where(den == 0, 1e-300, den)
        Z[alive] = (a * w2 - b) / den
    return counts


def sqrt_continue_scan(g, w0, ratio, zero_tol):
    """Continue a square-root branch along the sample sequence g.

    Returns (values, ambiguous_index, zero_index): values[i] is the continued
    branch of sqrt(g[i]); ambiguous_index is the first sample where the two
    candidate roots were within `ratio` of equidistant from the previous
    value (-1 if none); zero_index the first |g| < zero_tol (-1 if none).
    The scan always completes; callers decide whether flagged indices are
    fatal.
    """
    g = np.asarray(g, dtype=np.complex128)
    n = g.shape[0]
    r = np.sqrt(g)
    absg = np.abs(g)
    zero_hits = absg < zero_tol
    zero_idx = int(np.argmax(zero_hits)) if zero_hits.any() else -1

    w0 = complex(w0)
    d_plus0 = abs(w0 - r[0])
    d_minus0 = abs(w0 + r[0])
    s0 = 1.0 if d_plus0 <= d_minus0 else -1.0

    if n == 1:
        return r * s0, -1, zero_idx

    dm = np.abs(r[1:] - r[:-1])
    dp = np.abs(r[1:] + r[:-1])
    flip = dp < dm
    lo = np.minimum(dm, dp)
    hi = np.maximum(dm, dp)
    ambiguous = hi < ratio * lo
    ambig_idx = int(np.argmax(ambiguous)) + 1 if ambiguous.any() else -1

    steps = np.where(flip, -1.0, 1.0)
    signs = np.empty(n, dtype=np.float64)
    signs[0] = s0
    signs[1:] = s0 * np.cumprod(steps)
    return r * signs, ambig_idx, zero_idx


def max_pair_chordal(pts):
    """Max chordal distance over all pairs of finite sample points."""
    pts = np.asarray(pts, dtype=np.complex128)
    n = pts.shape[0]
    if n < 2:
        return 0.0
    w = np.hypot(1.0, np.abs(pts))
    best = 0.0
    for i in range(n - 1):
        d = 2.0 * np.abs(pts[i + 1 :] - pts[i]) / (w[i + 1 :] * w[i])
        m = d.max()
        if m > best:
            best = m
    return float(best)


def min_cross_chordal(a_pts, b_pts):
    """Min chordal distance between two finite sample sets."""
    a = np.asarray(a_pts, dtype=np.complex128)
    b = np.asarray(b_pts, dtype=np.complex128)
    wa = np.hypot(1.0, np.abs(a))
    wb = np.hypot(1.0, np.abs(b))
    d = 2.0 * np.abs(a[:, None] - b[None, :]) / (wa[:, None] * wb[None, :])
    return float(d.min())


def _seg_seg_dist2(ax, ay, bx, by, cx, cy, dx, dy):
    """Squared Euclidean distance between segments AB and CD (vectorized in
    C/D arrays)."""
    # proper-crossing test via orientations
    def orient(ox, oy, px, py, qx, qy):
        return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)

    o1 = orient(ax, ay, bx, by, cx, cy)
    o2 = orient(ax, ay, bx, by, dx, dy)
    o3 = orient(cx, cy, dx, dy, ax, ay)
    o4 = orient(cx, cy, dx, dy, bx, by)
    crossing = ((o1 > 0) != (o2 > 0)) & ((o3 > 0) != (o4 > 0))

    def pt_seg_d2(px, py, ux, uy, vx, vy):
        wx, wy = vx - ux, vy - uy
        ww = wx * wx + wy * wy
        t = np.where(ww > 0, ((px - ux) * wx + (py - uy) * wy) / np.where(ww > 0, ww, 1.0), 0.0)
        t = np.clip(t, 0.0, 1.0)
        qx = ux + t * wx
        qy = uy + t * wy
        return (px - qx) ** 2 + (py - qy) ** 2

    d2 = np.minimum(
        np.minimum(pt_seg_d2(cx, cy, ax, ay, bx, by), pt_seg_d2(dx, dy, ax, ay, bx, by)),
        np.minimum(pt_seg_d2(ax, ay, cx, cy, dx, dy), pt_seg_d2(bx, by, cx, cy, dx, dy)),
    )
    return np.where(crossing, 0.0, d2)


def segment_polyline_dist(ax, ay, bx, by, xs, ys, closed):
    """Min Euclidean distance between segment AB and a polyline."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    cx, cy = xs[:-1], ys[:-1]
    dx, dy = xs[1:], ys[1:]
    if closed and xs.shape[0] > 2:
        cx = np.append(cx, xs[-1])
        cy = np.append(cy, ys[-1])
        dx = np.append(dx, xs[0])
        dy = np.append(dy, ys[0])
    if cx.size == 0:
        return float(np.hypot(xs[0] - ax, ys[0] - ay))
    d2 = _seg_seg_dist2(ax, ay, bx, by, cx, cy, dx, dy)
    return float(np.sqrt(d2.min()))


def point_polyline_dist(px, py, xs, ys, closed):
    """Min Euclidean distance from a point to a polyline."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    ux, uy = xs[:-1], ys[:-1]
    vx, vy = xs[1:], ys[1:]
    if closed and xs.shape[0] > 2:
        ux = np.append(ux, xs[-1])
        uy = np.append(uy, ys[-1])
        vx = np.append(vx, xs[0])
        vy = np.append(vy, ys[0])
    wx, wy = vx - ux, vy - uy
    ww = wx * wx + wy * wy
    t = np.where(ww > 0, ((px - ux) * wx + (py - uy) * wy) / np.where(ww > 0, ww, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    qx = ux + t * wx
    qy = uy + t * wy
    d2 = (px - qx) ** 2 + (py - qy) ** 2
    return float(np.sqrt(d2.min()))


def polylines_min_dist(xs1, ys1, closed1, xs2, ys2, closed2):
    """Min Euclidean distance between two polylines (0 if they cross)."""
    xs1 = np.asarray(xs1, dtype=np.float64)
    ys1 = np.asarray(ys1, dtype=np.float64)
    best = np.inf
    n = xs1.shape[0]
    for i in range(n - 1):
        d = segment_polyline_dist(xs1[i], ys1[i], xs1[i + 1], ys1[i + 1], xs2, ys2, closed2)
        if d < best:
            best = d
            if best == 0.0:
                return 0.0
    if closed1 and n > 2:
        d = segment_polyline_dist(xs1[-1], ys1[-1], xs1[0], ys1[0], xs2, ys2, closed2)
        best = min(best, d)
    return float(best)
