"""Green's function, external-ray tracing, and symmetric path construction.

The escape-rate potential G of p_c satisfies G(p_c(z)) = 2 G(z) and equals
log|z| + o(1) at infinity.  External rays are its gradient curves at fixed
angle; tracing steps the potential down geometrically, solving the
escape-coordinate equation p_c^(o k)(z) = exp(2^k (G + 2 pi i theta)) by
Newton iterations seeded from the previous sample.  Rays either land (reach
the floor potential), crash into a precritical point (the gradient
degenerates), or exhaust the sample budget.

A symmetric regluing path through the critical point is assembled from a
ray pair crashing into 0: the reversed negative-ray trace, the origin, and
the positive-ray trace, averaged into exact odd symmetry.

This module targets maps with escaping critical orbit (disconnected Julia
set) and real-map demonstrations; no claim is made about resolving ray
combinatorics for arbitrary parameters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import AsymmetryTooLarge, RaysDontMeetCritical, ReglueError
from .families import PolyParam, eval_poly
from .sphere import (ExtComplex, Pointlike, SampledCurve, chordal_distance,
                     ext, point_curve_distance)

STEP_FACTOR = 0.85        # geometric potential descent per sample
RAY_STEP_CHORDAL = 0.1    # max chordal gap between consecutive samples
CRASH_RADIUS = 1e-6       # proximity to a precritical point that ends a ray
NEWTON_TOL = 1e-13
MAX_SAMPLES = 4000
LOG_BIG = math.log(1e9)   # work at this escape magnitude in the Newton target


class AdmissibilityResult(tuple):
    """(ok, first_violation_n, distance); truthy iff admissible."""

    def __new__(cls, ok: bool, n: Optional[int], distance: Optional[float]):
        return super().__new__(cls, (ok, n, distance))

    @property
    def ok(self):
        return self[0]

    def __bool__(self):
        return bool(self[0])


@dataclass
class RayTrace:
    """Sampled external ray: angle (turns), (potential, point) samples with
    strictly decreasing potential, and the termination reason."""

    angle: float
    samples: List[Tuple[float, complex]]
    terminated: str  # landed | crashed | budget

    @property
    def points(self) -> List[complex]:
        return [p for _, p in self.samples]


def green_value(c, z: Pointlike, n_max: int = 200, R_escape: Optional[float] = None) -> float:
    """Escape-rate potential of p_c at z: 2^-k log|p_c^(o k)(z)| at a deep
    iterate, 0 if the orbit stays bounded for n_max steps.

    After first escape the iteration continues until |z| >= 1e100 (or n_max)
    so the dyadic limit is exhausted to double precision.
    """
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    if R_escape is None:
        R_escape = 4.0 + abs(p.c)
    z = ext(z)
    if z.is_inf:
        return math.inf
    w = z.value
    k = 0
    escaped = False
    while k < n_max:
        if abs(w) > R_escape:
            escaped = True
        if abs(w) >= 1e100:
            break
        w = w * w + p.c
        k += 1
        if abs(w) >= 1e100:
            break
    if not escaped and abs(w) <= R_escape:
        return 0.0
    return math.log(abs(w)) / (2.0 ** k)


def _newton_ray_point(p: PolyParam, G: float, theta: float, seed: complex,
                      max_iter: int = 60) -> Tuple[complex, float]:
    """Solve p^(o k)(z) = exp(2^k (G + 2 pi i theta)) for the smallest k
    putting the target beyond the escape magnitude; returns (point,
    min |iterate| along the solution orbit) for crash detection."""
    k = 0
    while (2.0 ** k) * G < LOG_BIG:
        k += 1
    mod = (2.0 ** k) * theta
    mod -= math.floor(mod)
    target = cmath.exp(complex((2.0 ** k) * G, 2.0 * math.pi * mod))
    z = seed
    for _ in range(max_iter):
        w = z
        deriv = 1.0 + 0j
        min_orb = abs(z)
        for _ in range(k):
            deriv *= 2.0 * w
            w = w * w + p.c
            if abs(w) < min_orb:
                min_orb = abs(w)
        if abs(deriv) < 1e-9:
            return z, 0.0  # gradient degenerate: precritical point
        step = (w - target) / deriv
        z = z - step
        if abs(step) <= NEWTON_TOL * max(1.0, abs(z)):
            # recompute orbit minimum at the solution
            u = z
            min_orb = abs(u)
            for _ in range(k):
                u = u * u + p.c
                if abs(u) < min_orb:
                    min_orb = abs(u)
            return z, min_orb
    raise ReglueError("ray Newton iteration did not converge")


def trace_ray(c, theta: float, G_hi: float, G_lo: float) -> RayTrace:
    """Trace the angle-theta external ray from potential G_hi down to G_lo.

    Termination is data, not an error: "landed" when G_lo is reached with
    settling samples, "crashed" when the ray runs into a precritical point
    (detected by a vanishing Newton gradient, an approach to the critical
    point, or a step that no subdivision can make continuous), "budget"
    otherwise.
    """
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    if not (0 < G_lo < G_hi):
        raise ValueError("need 0 < G_lo < G_hi")
    theta = theta % 1.0

    G = G_hi
    z = cmath.exp(complex(G, 2.0 * math.pi * theta))
    try:
        z, _ = _newton_ray_point(p, G, theta, z)
    except ReglueError:
        return RayTrace(theta, [], "crashed")
    samples: List[Tuple[float, complex]] = [(G, z)]
    terminated = "budget"

    while len(samples) < MAX_SAMPLES:
        if G <= G_lo:
            terminated = "landed"
            break
        G_next = max(G * STEP_FACTOR, G_lo)
        ok = False
        for _halving in range(13):
            try:
                z_next, min_orb = _newton_ray_point(p, G_next, theta, z)
            except ReglueError:
                z_next, min_orb = None, None
            if z_next is not None and min_orb < CRASH_RADIUS:
                samples.append((G_next, z_next))
                return RayTrace(theta, samples, "crashed")
            if z_next is not None and chordal_distance(z, z_next) <= RAY_STEP_CHORDAL:
                ok = True
                break
            G_next = math.sqrt(G * G_next)  # halve the descent step
        if not ok:
            # the ray cannot be continued past this potential
            terminated = "crashed" if abs(z) < 10 * CRASH_RADIUS else "budget"
            break
        G = G_next
        z = z_next
        samples.append((G, z))

    if terminated == "landed" and len(samples) >= 2:
        d_last = chordal_distance(samples[-1][1], samples[-2][1])
        if d_last > RAY_STEP_CHORDAL:
            terminated = "budget"
    return RayTrace(theta, samples, terminated)


def build_alpha0(c, theta_pair: Tuple[float, float], rho: float,
                 G_floor: float = 1e-7) -> SampledCurve:
    """Assemble the symmetric regluing path from a ray pair through 0.

    Both rays are traced from potential rho down; they must terminate within
    1e-6 chordal of the critical point 0 (crash into it, or land at it).
    The output is the reversed negative trace, the origin, and the positive
    trace, with endpoints at potential rho, symmetrized by averaging with
    its negation-reversal (mismatch above 1e-6 is an error).
    """
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    t_plus, t_minus = theta_pair
    ray_p = trace_ray(p, t_plus, rho, G_floor)
    ray_m = trace_ray(p, t_minus, rho, G_floor)
    for ray in (ray_p, ray_m):
        if not ray.samples:
            raise RaysDontMeetCritical(
                f"ray at angle {ray.angle} produced no samples")
        end = ray.samples[-1][1]
        if chordal_distance(end, 0.0) > 1e-6:
            raise RaysDontMeetCritical(
                "ray at angle %g terminates at %.6g%+.6gi, not at the "
                "critical point 0" % (ray.angle, end.real, end.imag))

    plus_pts = [pt for _, pt in ray_p.samples]     # potential rho -> 0
    minus_pts = [pt for _, pt in ray_m.samples]
    # path order: -endpoint ... 0 ... +endpoint
    pts = [p_ for p_ in reversed(minus_pts)] + [0j] + plus_pts
    pts = _dedupe(pts)

    arr = np.array(pts, dtype=np.complex128)
    mirrored = -arr[::-1]
    mismatch = np.abs(arr - mirrored).max()
    if mismatch > 1e-6:
        raise AsymmetryTooLarge(
            "ray pair is not odd-symmetric (max deviation %.3e)" % mismatch)
    sym = 0.5 * (arr + mirrored)
    pts = _dedupe([complex(v) for v in sym])
    # orient so the t=+1 endpoint is the positive-ray end
    return SampledCurve(pts, closed=False, symmetric=True)


def _dedupe(pts: List[complex]) -> List[complex]:
    out = [pts[0]]
    for q in pts[1:]:
        if q != out[-1]:
            out.append(q)
    return out


def check_admissible(c, alpha0: SampledCurve, N: int) -> AdmissibilityResult:
    """Whether the forward orbit of alpha0(1) stays clear of the path for
    N iterates (clearance 1e-6); returns the first violating iterate and
    its distance otherwise."""
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    if not alpha0.symmetric:
        raise ValueError("alpha0 must be symmetric")
    w = alpha0.endpoint
    for n in range(1, N + 1):
        w = eval_poly(p, w)
        if w.is_inf:
            break
        d = point_curve_distance(w, alpha0)
        if d <= 1e-6:
            return AdmissibilityResult(False, n, d)
        if abs(w.value) > 1e50:
            break
    return AdmissibilityResult(True, None, None)


# ---------------------------------------------------------------------------
# serialization: curve format plus a potential column
# ---------------------------------------------------------------------------

def ray_to_text(ray: RayTrace) -> str:
    lines = ["ray angle=%.17g terminated=%s n=%d"
             % (ray.angle, ray.terminated, len(ray.samples))]
    for G, z in ray.samples:
        lines.append("%.17g %.17g %.17g" % (G, z.real, z.imag))
    return "\n".join(lines) + "\n"


def ray_from_text(text: str) -> RayTrace:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ray "):
        raise ValueError("not a ray document")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    n = int(fields["n"])
    samples = []
    for ln in lines[1:]:
        g_s, re_s, im_s = ln.split()
        samples.append((float(g_s), complex(float(re_s), float(im_s))))
    if len(samples) != n:
        raise ValueError("ray header promises %d samples, found %d" % (n, len(samples)))
    return RayTrace(float(fields["angle"]), samples, fields["terminated"])
