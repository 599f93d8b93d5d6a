# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: escape iteration, branch-continuation scans, and
chordal curve geometry.  API mirror of reglue._kernels_py."""

import numpy as np

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef extern from "math.h" nogil:
    double hypot(double, double)
    double sqrt(double)
    double fabs(double)

BACKEND = "cython"


def escape_counts(xs, ys, double cre, double cim, double radius, int max_iter):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t w = xv.shape[0], h = yv.shape[0]
    counts_arr = np.empty((h, w), dtype=np.int32)
    cdef int[:, ::1] counts = counts_arr
    cdef double r2 = radius * radius
    cdef double zr, zi, t
    cdef Py_ssize_t i, j
    cdef int k, hit
    with nogil:
        for i in range(h):
            for j in range(w):
                zr = xv[j]
                zi = yv[i]
                if zr * zr + zi * zi > r2:
                    counts[i, j] = 0
                    continue
                hit = -1
                for k in range(1, max_iter + 1):
                    t = zr * zr - zi * zi + cre
                    zi = 2.0 * zr * zi + cim
                    zr = t
                    if zr * zr + zi * zi > r2:
                        hit = k
                        break
                counts[i, j] = hit
    return counts_arr


def attraction_counts(xs, ys, double are, double aim, double bre, double bim,
                      cyc, double tol, int max_iter):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double complex[::1] cv = np.ascontiguousarray(cyc, dtype=np.complex128)
    cdef Py_ssize_t w = xv.shape[0], h = yv.shape[0], ncyc = cv.shape[0]
    counts_arr = np.empty((h, w), dtype=np.int32)
    cdef int[:, ::1] counts = counts_arr
    cdef double complex a, b, z, w2, p
    cdef double tol2 = tol * tol, q, pp, d2, den_r
    cdef Py_ssize_t i, j, m
    cdef int k, hit
    a = are + 1j * aim
    b = bre + 1j * bim
    with nogil:
        for i in range(h):
            for j in range(w):
                z = xv[j] + 1j * yv[i]
                hit = -1
                for k in range(max_iter + 1):
                    q = 1.0 + creal(z) * creal(z) + cimag(z) * cimag(z)
                    for m in range(ncyc):
                        p = cv[m]
                        pp = 1.0 + creal(p) * creal(p) + cimag(p) * cimag(p)
                        d2 = cabs(z - p)
                        d2 = 4.0 * d2 * d2 / (q * pp)
                        if d2 < tol2:
                            hit = k
                            break
                    if hit >= 0 or k == max_iter:
                        break
                    w2 = z * z
                    den_r = cabs(w2 - 1.0)
                    if den_r == 0.0:
                        z = 1e300 + 0j
                    else:
                        z = (a * w2 - b) / (w2 - 1.0)
                counts[i, j] = hit
    return counts_arr


def sqrt_continue_scan(g, w0, double ratio, double zero_tol):
    cdef double complex[::1] gv = np.ascontiguousarray(g, dtype=np.complex128)
    cdef Py_ssize_t n = gv.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex r, prev_r, seed = w0
    cdef double dm, dp, lo, hi, s, prev_s
    cdef Py_ssize_t i
    cdef Py_ssize_t ambig = -1, zero = -1
    with nogil:
        prev_r = csqrt(gv[0])
        if cabs(gv[0]) < zero_tol and zero < 0:
            zero = 0
        if cabs(seed - prev_r) <= cabs(seed + prev_r):
            prev_s = 1.0
        else:
            prev_s = -1.0
        out[0] = prev_s * prev_r
        for i in range(1, n):
            r = csqrt(gv[i])
            if cabs(gv[i]) < zero_tol and zero < 0:
                zero = i
            dm = cabs(r - prev_r)
            dp = cabs(r + prev_r)
            if dm <= dp:
                lo = dm
                hi = dp
                s = prev_s
            else:
                lo = dp
                hi = dm
                s = -prev_s
            if hi < ratio * lo and ambig < 0:
                ambig = i
            out[i] = s * r
            prev_r = r
            prev_s = s
    return out_arr, int(ambig), int(zero)


def max_pair_chordal(pts):
    cdef double complex[::1] pv = np.ascontiguousarray(pts, dtype=np.complex128)
    cdef Py_ssize_t n = pv.shape[0]
    cdef double best = 0.0, d
    cdef double* wts
    cdef Py_ssize_t i, j
    if n < 2:
        return 0.0
    w_arr = np.hypot(1.0, np.abs(np.asarray(pv)))
    cdef double[::1] wv = np.ascontiguousarray(w_arr, dtype=np.float64)
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                d = 2.0 * cabs(pv[i] - pv[j]) / (wv[i] * wv[j])
                if d > best:
                    best = d
    return best


def min_cross_chordal(a_pts, b_pts):
    cdef double complex[::1] av = np.ascontiguousarray(a_pts, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b_pts, dtype=np.complex128)
    cdef Py_ssize_t na = av.shape[0], nb = bv.shape[0]
    wa_arr = np.hypot(1.0, np.abs(np.asarray(av)))
    wb_arr = np.hypot(1.0, np.abs(np.asarray(bv)))
    cdef double[::1] wa = np.ascontiguousarray(wa_arr, dtype=np.float64)
    cdef double[::1] wb = np.ascontiguousarray(wb_arr, dtype=np.float64)
    cdef double best = 1e308, d
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(na):
            for j in range(nb):
                d = 2.0 * cabs(av[i] - bv[j]) / (wa[i] * wb[j])
                if d < best:
                    best = d
    return best


cdef inline double _orient(double ox, double oy, double px, double py,
                           double qx, double qy) nogil:
    return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)


cdef inline double _pt_seg_d2(double px, double py, double ux, double uy,
                              double vx, double vy) nogil:
    cdef double wx = vx - ux, wy = vy - uy
    cdef double ww = wx * wx + wy * wy
    cdef double t
    if ww > 0.0:
        t = ((px - ux) * wx + (py - uy) * wy) / ww
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    else:
        t = 0.0
    cdef double qx = ux + t * wx, qy = uy + t * wy
    return (px - qx) * (px - qx) + (py - qy) * (py - qy)


cdef inline double _seg_seg_d2(double ax, double ay, double bx, double by,
                               double cx, double cy, double dx, double dy) nogil:
    cdef double o1 = _orient(ax, ay, bx, by, cx, cy)
    cdef double o2 = _orient(ax, ay, bx, by, dx, dy)
    cdef double o3 = _orient(cx, cy, dx, dy, ax, ay)
    cdef double o4 = _orient(cx, cy, dx, dy, bx, by)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)):
        return 0.0
    cdef double d2 = _pt_seg_d2(cx, cy, ax, ay, bx, by)
    cdef double t = _pt_seg_d2(dx, dy, ax, ay, bx, by)
    if t < d2:
        d2 = t
    t = _pt_seg_d2(ax, ay, cx, cy, dx, dy)
    if t < d2:
        d2 = t
    t = _pt_seg_d2(bx, by, cx, cy, dx, dy)
    if t < d2:
        d2 = t
    return d2


def segment_polyline_dist(double ax, double ay, double bx, double by,
                          xs, ys, closed):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef bint wrap = bool(closed) and n > 2
    cdef double best = 1e308, d2
    cdef Py_ssize_t i
    if n == 1:
        return hypot(xv[0] - ax, yv[0] - ay)
    with nogil:
        for i in range(n - 1):
            d2 = _seg_seg_d2(ax, ay, bx, by, xv[i], yv[i], xv[i + 1], yv[i + 1])
            if d2 < best:
                best = d2
                if best == 0.0:
                    break
        if wrap and best > 0.0:
            d2 = _seg_seg_d2(ax, ay, bx, by, xv[n - 1], yv[n - 1], xv[0], yv[0])
            if d2 < best:
                best = d2
    return sqrt(best)


def point_polyline_dist(double px, double py, xs, ys, closed):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef bint wrap = bool(closed) and n > 2
    cdef double best = 1e308, d2
    cdef Py_ssize_t i
    if n == 1:
        return hypot(xv[0] - px, yv[0] - py)
    with nogil:
        for i in range(n - 1):
            d2 = _pt_seg_d2(px, py, xv[i], yv[i], xv[i + 1], yv[i + 1])
            if d2 < best:
                best = d2
        if wrap:
            d2 = _pt_seg_d2(px, py, xv[n - 1], yv[n - 1], xv[0], yv[0])
            if d2 < best:
                best = d2
    return sqrt(best)


def polylines_min_dist(xs1, ys1, closed1, xs2, ys2, closed2):
    cdef double[::1] x1 = np.ascontiguousarray(xs1, dtype=np.float64)
    cdef double[::1] y1 = np.ascontiguousarray(ys1, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(xs2, dtype=np.float64)
    cdef double[::1] y2 = np.ascontiguousarray(ys2, dtype=np.float64)
    cdef Py_ssize_t n1 = x1.shape[0], n2 = x2.shape[0]
    cdef bint w1 = bool(closed1) and n1 > 2
    cdef bint w2 = bool(closed2) and n2 > 2
    cdef double best = 1e308, d2
    cdef Py_ssize_t i, j
    cdef Py_ssize_t e1 = n1 - 1 + (1 if w1 else 0)
    cdef Py_ssize_t e2 = n2 - 1 + (1 if w2 else 0)
    cdef double ax, ay, bx, by, cx, cy, dx, dy
    with nogil:
        for i in range(e1):
            ax = x1[i]
            ay = y1[i]
            if i == n1 - 1:
                bx = x1[0]
                by = y1[0]
            else:
                bx = x1[i + 1]
                by = y1[i + 1]
            for j in range(e2):
                cx = x2[j]
                cy = y2[j]
                if j == n2 - 1:
                    dx = x2[0]
                    dy = y2[0]
                else:
                    dx = x2[j + 1]
                    dy = y2[j + 1]
                d2 = _seg_seg_d2(ax, ay, bx, by, cx, cy, dx, dy)
                if d2 < best:
                    best = d2
                    if best == 0.0:
                        break
            if best == 0.0:
                break
    return sqrt(best)
