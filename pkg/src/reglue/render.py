"""Escape-time images, curve overlays, and conjugacy-image scatters.

Output is binary P6 PPM, byte-exact across runs and thread counts: every
pixel is a pure function of the viewport and map, and assembly is
position-addressed.  Pixel-center coordinates are computed by the symmetric
formula hw*(2j+1-W)/W so that viewports centered at 0 sample exact +-pairs
(escape iteration is sign-symmetric in floats, so even maps render evenly).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._backend import kernels
from .branch import Tower, eval_phi
from .errors import OnCutCurve, ReglueError
from .families import MapParam, PolyParam, RatParam, eval_rat
from .sphere import INF, CurveFamily, ExtComplex, Pointlike, chordal_distance, ext

MAX_PIXELS = 10 ** 8
ATTRACT_TOL = 1e-6
MAX_CYCLE_PERIOD = 64


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned window: center, half-width, and the pixel grid.

    The half-height follows from the aspect ratio of the grid."""

    center: complex
    half_width: float
    width_px: int
    height_px: int

    def __post_init__(self):
        c = complex(ext(self.center).value)
        object.__setattr__(self, "center", c)
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("pixel dimensions must be positive")
        if self.width_px * self.height_px > MAX_PIXELS:
            raise ValueError("viewport exceeds the 1e8 pixel budget")

    @property
    def half_height(self) -> float:
        return self.half_width * self.height_px / self.width_px

    def x_centers(self) -> np.ndarray:
        w = self.width_px
        j = np.arange(w, dtype=np.float64)
        return self.center.real + self.half_width * (2.0 * j + 1.0 - w) / w

    def y_centers(self) -> np.ndarray:
        """Row 0 is the top of the image."""
        h = self.height_px
        i = np.arange(h, dtype=np.float64)
        return self.center.imag - self.half_height * (2.0 * i + 1.0 - h) / h

    def pixel_of(self, z: complex) -> Optional[Tuple[int, int]]:
        """(row, col) containing z, or None when outside the viewport."""
        x = (z.real - self.center.real) / (2.0 * self.half_width) + 0.5
        y = 0.5 - (z.imag - self.center.imag) / (2.0 * self.half_height)
        col = int(math.floor(x * self.width_px))
        row = int(math.floor(y * self.height_px))
        if 0 <= col < self.width_px and 0 <= row < self.height_px:
            return (row, col)
        return None


class Image:
    """Row-major 8-bit RGB raster."""

    __slots__ = ("width", "height", "pixels")

    def __init__(self, width: int, height: int, pixels: Optional[bytearray] = None):
        if width < 1 or height < 1:
            raise ValueError("image dimensions must be positive")
        if pixels is None:
            pixels = bytearray(3 * width * height)
        if len(pixels) != 3 * width * height:
            raise ValueError("pixel buffer size does not match dimensions")
        self.width = width
        self.height = height
        self.pixels = bytearray(pixels)

    def put(self, row: int, col: int, rgb: Tuple[int, int, int]) -> None:
        k = 3 * (row * self.width + col)
        self.pixels[k:k + 3] = bytes(rgb)

    def get(self, row: int, col: int) -> Tuple[int, int, int]:
        k = 3 * (row * self.width + col)
        return tuple(self.pixels[k:k + 3])

    def copy(self) -> "Image":
        return Image(self.width, self.height, bytearray(self.pixels))


def _build_palette() -> List[Tuple[int, int, int]]:
    """Fixed 256-entry palette (cosine ramp); index 0 is reserved for the
    non-escaping color black handled separately."""
    pal = []
    for i in range(256):
        t = i / 255.0
        r = int(round(255 * (0.5 + 0.5 * math.cos(6.283185307179586 * (t + 0.00)))))
        g = int(round(255 * (0.5 + 0.5 * math.cos(6.283185307179586 * (t + 0.33)))))
        b = int(round(255 * (0.5 + 0.5 * math.cos(6.283185307179586 * (t + 0.67)))))
        pal.append((r, g, b))
    return pal


PALETTE = _build_palette()
BLACK = (0, 0, 0)


def _counts_to_pixels(counts: np.ndarray) -> bytearray:
    pal = np.array(PALETTE, dtype=np.uint8)
    idx = np.mod(counts, 256)
    rgb = pal[idx]
    rgb[counts < 0] = (0, 0, 0)
    return bytearray(rgb.tobytes())


def _find_attracting_cycle(r: RatParam, max_iter: int) -> np.ndarray:
    """Detect an attracting cycle from the critical orbits of 0 and inf."""
    for start in (ExtComplex(0.0), INF):
        w = start
        tail: List[complex] = []
        ok = True
        for _ in range(max_iter):
            w = eval_rat(r, w)
            if w.is_inf:
                tail.append(complex(1e300, 0.0))
            else:
                tail.append(w.value)
        if not tail:
            continue
        last = tail[-1]
        for p in range(1, min(MAX_CYCLE_PERIOD, len(tail) - 1) + 1):
            if chordal_distance(last, tail[-1 - p]) < 1e-9:
                cyc = tail[-p:]
                if all(abs(z) < 1e200 for z in cyc):
                    return np.array(cyc, dtype=np.complex128)
        _ = ok
    return np.empty(0, dtype=np.complex128)


def render_julia(m: MapParam, v: Viewport, max_iter: int = 256,
                 threads: int = 1) -> Image:
    """Escape-time (polynomial) or attraction-time (rational) coloring.

    Polynomial escape radius is 8+|c|; rational pixels are timed until the
    orbit comes within 1e-6 chordal of the attracting cycle detected from
    the critical orbits.  Non-escaping / non-attracted pixels are black.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    xs = v.x_centers()
    ys = v.y_centers()

    if isinstance(m, PolyParam):
        radius = 8.0 + abs(m.c)

        def run_rows(y_slice):
            return kernels.escape_counts(xs, ys[y_slice], m.c.real, m.c.imag,
                                         radius, max_iter)
    else:
        cyc = _find_attracting_cycle(m, max(max_iter, 512))

        def run_rows(y_slice):
            if cyc.size == 0:
                return np.full((len(ys[y_slice]), len(xs)), -1, dtype=np.int32)
            return kernels.attraction_counts(xs, ys[y_slice], m.a.real, m.a.imag,
                                             m.b.real, m.b.imag, cyc,
                                             ATTRACT_TOL, max_iter)

    counts = np.empty((v.height_px, v.width_px), dtype=np.int32)
    if threads <= 1 or v.height_px < 2 * threads:
        counts[:, :] = run_rows(slice(None))
    else:
        bounds = np.linspace(0, v.height_px, threads + 1, dtype=int)
        slices = [slice(bounds[i], bounds[i + 1]) for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for sl, block in zip(slices, pool.map(run_rows, slices)):
                counts[sl] = block
    return Image(v.width_px, v.height_px, _counts_to_pixels(counts))


def overlay_curves(img: Image, v: Viewport, fam: CurveFamily,
                   color: Tuple[int, int, int]) -> Image:
    """Draw 1-px polylines (Bresenham) over a copy of the image."""
    out = img.copy()
    for curve in fam:
        pts = curve.points
        edges = list(zip(pts, pts[1:]))
        if curve.closed and len(pts) > 2:
            edges.append((pts[-1], pts[0]))
        for a, b in edges:
            if a.is_inf or b.is_inf:
                continue
            _draw_segment(out, v, a.value, b.value, color)
    return out


def _draw_segment(img: Image, v: Viewport, a: complex, b: complex,
                  color: Tuple[int, int, int]) -> None:
    pa = _to_pixel_unclamped(v, a)
    pb = _to_pixel_unclamped(v, b)
    r0, c0 = pa
    r1, c1 = pb
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    if max(dr, dc) > 8 * (v.width_px + v.height_px):
        return  # wildly out of view; clipping per-pixel would still be O(huge)
    sr = 1 if r0 < r1 else -1
    sc = 1 if c0 < c1 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        if 0 <= r < img.height and 0 <= c < img.width:
            img.put(r, c, color)
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
    return


def _to_pixel_unclamped(v: Viewport, z: complex) -> Tuple[int, int]:
    x = (z.real - v.center.real) / (2.0 * v.half_width) + 0.5
    y = 0.5 - (z.imag - v.center.imag) / (2.0 * v.half_height)
    return (int(math.floor(y * v.height_px)), int(math.floor(x * v.width_px)))


@dataclass
class ScatterReport:
    rendered: int
    skipped: int


def render_phi_image(tower: Tower, n: int, sample_pts: Sequence[Pointlike],
                     v: Viewport, color: Tuple[int, int, int] = (255, 255, 255)
                     ) -> Tuple[Image, ScatterReport]:
    """Scatter-plot the stage-n conjugacy images of the samples.

    Samples whose composition chain hits a cut curve are skipped silently
    and counted in the side report."""
    img = Image(v.width_px, v.height_px)
    rendered = 0
    skipped = 0
    for p in sample_pts:
        try:
            w = eval_phi(tower, n, p)
        except ReglueError:
            skipped += 1
            continue
        if w.is_inf:
            skipped += 1
            continue
        px = v.pixel_of(w.value)
        if px is not None:
            img.put(px[0], px[1], color)
        rendered += 1
    return img, ScatterReport(rendered=rendered, skipped=skipped)


def sample_julia_points(c, count: int, seed: int = 0, burn: int = 24) -> List[complex]:
    """Julia-set samples of p_c by inverse iteration with random branch signs
    (deterministic for a fixed seed)."""
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    rng = np.random.default_rng(seed)
    z = complex(2.5, 0.1)
    out: List[complex] = []
    total = count + burn
    signs = rng.integers(0, 2, size=total)
    for k in range(total):
        w = z - p.c
        r = complex(np.sqrt(complex(w)))
        z = r if signs[k] == 0 else -r
        if k >= burn:
            out.append(z)
    return out


def write_ppm(img: Image, path) -> None:
    """Binary P6: ASCII header, then raw RGB bytes; byte-exact."""
    header = b"P6\n%d %d\n255\n" % (img.width, img.height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bytes(img.pixels))


def ppm_bytes(img: Image) -> bytes:
    return b"P6\n%d %d\n255\n" % (img.width, img.height) + bytes(img.pixels)
