"""Branch-tracked evaluation of square-root towers.

A :class:`Tower` records the data of the straightening recursion

    f_1 = j o R_0,   f_{n+1} = j_n o R_n,

where R_n is a quadratic map (p_{c_n} or R_{a_n,b_n}), j is a closed-form
square-root branch cut along the base path alpha0, and j_n is the branch of
R_n^{-1} o f_n fixed by the family normalization (tangent to the identity at
infinity for polynomials, j_n(1)=1 for rational maps).  Each f_n / j_n is
holomorphic off a finite union of cut curves Gamma_n.

Evaluation is by analytic continuation along sampled paths: a path in the
stage-n plane avoiding Gamma_n is pushed through R_{n-1} to a stage-(n-1)
path, continued there recursively, and the resulting sample sequence feeds a
nearest-sign square-root scan.  Signs are the only state that propagates;
every returned value is a fresh square root of exactly-evaluated data, so
the output precision is set by double rounding, not by path length.

Polynomial towers are normalized at infinity, which gives two shortcuts:

* at |z| >= 1e8 every j_n equals the identity to double precision, which
  caps the magnitudes appearing in the recursion;
* a branch value at |z| >= 1e4 may be seeded as the square root nearer z
  without any routing (the branch is within O(|z|^-1) of the identity).

Rational towers have no normalization at infinity, so each stage carries a
generic anchor point with a stored branch value, bootstrapped once per stage
by continuation from the normalization point 1 (where the defining ratio has
the removable value 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ._backend import kernels
from .errors import (AmbiguousStep, OnCutCurve, Unroutable, ZeroCrossing)
from .families import MapParam, PolyParam, RatParam, eval_map
from .sphere import (INF, CurveFamily, ExtComplex, Pointlike, SampledCurve,
                     chordal_distance, ext, point_family_distance,
                     segment_crosses_family)

R_ID = 1e8        # beyond this radius, polynomial j_n == identity in doubles
R_FARSEED = 1e4   # beyond this radius, nearest-root seeding is unambiguous
CUT_CLEARANCE = 1e-9
STEP_BOUND = 0.05   # chordal bound between consecutive branch samples
MAX_HALVINGS = 12      # public continue_sqrt surfaces after this many
INTERNAL_HALVINGS = 44  # tower continuation keeps halving flagged gaps
AMBIG_RATIO = 1.05
ZERO_TOL = 1e-10
POLE_BOX_RADIUS = 0.02

# generic anchor candidates for rational stages (tried in order)
_ANCHOR_CANDIDATES = (2.0 + 0.7j, -1.6 + 0.9j, 0.6 - 1.4j, 2.3 - 1.1j,
                      -0.8 - 1.9j, 3.1 + 1.7j, 0.4 + 2.6j, -2.7 - 0.6j)


@dataclass
class PathRoute:
    """A crossing-free polygonal path between two finite points."""

    waypoints: Tuple[complex, ...]

    def __post_init__(self):
        w = tuple(complex(ext(p).value) for p in self.waypoints)
        if len(w) < 2:
            raise ValueError("a route needs at least two waypoints")
        for a, b in zip(w, w[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        object.__setattr__(self, "waypoints", w)


def route_path(frm: Pointlike, to: Pointlike, cuts: CurveFamily,
               clearance: float = CUT_CLEARANCE, max_depth: int = 12,
               retries: int = 8) -> PathRoute:
    """Find a polygonal path from `frm` to `to` whose segments avoid every
    curve of `cuts`.

    Tries the straight segment first, then recursively detours crossed
    segments through perpendicular offsets (starting at the extent of the
    crossed curves and doubling per retry).
    """
    a = complex(ext(frm).value)
    b = complex(ext(to).value)
    if point_family_distance(a, cuts) < clearance:
        raise ValueError("route start lies on a cut curve")
    if point_family_distance(b, cuts) < clearance:
        raise ValueError("route end lies on a cut curve")
    budget = [2000]  # total segment probes; keeps failure cheap

    def find(u: complex, v: complex, depth: int) -> List[complex]:
        if budget[0] <= 0:
            raise Unroutable("route search budget exhausted")
        budget[0] -= 1
        hits = segment_crosses_family(u, v, cuts, tol=clearance)
        if not hits:
            return [u, v]
        if depth >= max_depth:
            raise Unroutable("detour recursion depth exhausted")
        xs = np.concatenate([cuts.curves[i].array for i in hits])
        ext_x = xs.real.max() - xs.real.min()
        ext_y = xs.imag.max() - xs.imag.min()
        local = max(math.hypot(ext_x, ext_y), 1e-6)
        seg = v - u
        perp = 1j * seg / abs(seg)
        mid = 0.5 * (u + v)
        for r in range(retries):
            off = local * (2.0 ** r) * 1.05
            for sgn in (1.0, -1.0):
                m = mid + sgn * off * perp
                if point_family_distance(m, cuts) < clearance:
                    continue
                try:
                    left = find(u, m, depth + 1)
                    right = find(m, v, depth + 1)
                    return left[:-1] + right
                except Unroutable:
                    continue
        raise Unroutable("no perpendicular detour cleared the cut curves")

    way = find(a, b, 0)
    dedup = [way[0]]
    for p in way[1:]:
        if p != dedup[-1]:
            dedup.append(p)
    return PathRoute(tuple(dedup))


def continue_sqrt(g_values: Sequence[Pointlike], w0: Pointlike) -> ExtComplex:
    """Endpoint of the continuous branch of sqrt(g) along a sample sequence.

    Starting from w0 (a square root of g_values[0]), each step picks the
    root of the next sample nearer the previous branch value.

    Raises ZeroCrossing if a sample comes within 1e-10 of the branch point 0
    and AmbiguousStep if the two candidate roots are within factor 1.05 of
    equidistant from the previous value (the sampling is too coarse; the
    caller must refine).
    """
    vals = [ext(v) for v in g_values]
    if not vals:
        raise ValueError("empty sample sequence")
    if any(v.is_inf for v in vals):
        raise ValueError("samples must be finite")
    g = np.array([v.value for v in vals], dtype=np.complex128)
    w0 = ext(w0).value
    if abs(w0 * w0 - g[0]) > 1e-8 * max(abs(g[0]), 1e-30):
        raise ValueError("w0^2 does not match the first sample")
    w, ambig_idx, zero_idx = kernels.sqrt_continue_scan(g, w0, AMBIG_RATIO, ZERO_TOL)
    if zero_idx >= 0:
        raise ZeroCrossing(f"sample {zero_idx} is within 1e-10 of the branch point")
    if ambig_idx >= 0:
        raise AmbiguousStep(ambig_idx)
    return ExtComplex(complex(w[-1]))


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

@dataclass
class TowerStage:
    """Stage n of a tower (stored at list index n-1).

    param        -- the straightened quadratic R_{n-1} feeding this stage,
                    i.e. f_n = j_{n-1} o param.
    cut_set      -- Gamma_n, the cut curves of f_n (and domain boundary of
                    j_n); 2^n curves for a polynomial tower while tracking
                    is on, possibly empty beyond the tracking cap.
    cn           -- c_n = f_n(0) for polynomial towers.
    ab           -- (a_n, b_n) for rational towers.
    anchor       -- rational only: generic point with known j_n value.
    anchor_value -- rational only: j_n(anchor).
    """

    param: MapParam
    cut_set: CurveFamily
    cn: Optional[complex] = None
    ab: Optional[Tuple[complex, complex]] = None
    anchor: Optional[complex] = None
    anchor_value: Optional[complex] = None


class Tower:
    """The full regluing tower: base map, base path, and the stage stack.

    kind       -- "poly" or "rat".
    base       -- the original map f (PolyParam or RatParam).
    alpha0     -- the symmetric base path, or None for the degenerate
                  identity regluing (endpoint 0: every j is the identity).
    s          -- alpha0(1)^2, the square-root offset of the base branch.
    stages     -- TowerStage list; stages[n-1] describes stage n.

    Mutable only through append_stage during construction; evaluation treats
    towers as immutable values.
    """

    def __init__(self, kind: str, base: MapParam,
                 alpha0: Optional[SampledCurve], s: complex):
        if kind not in ("poly", "rat"):
            raise ValueError("kind must be 'poly' or 'rat'")
        self.kind = kind
        self.base = base
        self.alpha0 = alpha0
        self.s = complex(s)
        self.stages: List[TowerStage] = []
        self._zref_cache: Optional[Tuple[int, complex]] = None
        self._pole_boxes: Optional[CurveFamily] = None

    @property
    def degenerate(self) -> bool:
        return self.alpha0 is None

    @property
    def base_endpoint_sq(self) -> complex:
        return self.s

    @property
    def rat_normalizer(self) -> complex:
        return 1.0 - self.s

    def n_stages(self) -> int:
        return len(self.stages)

    def append_stage(self, stage: TowerStage) -> None:
        self.stages.append(stage)
        self._zref_cache = None

    def stage_cuts(self, k: int) -> CurveFamily:
        """Cut family of j_k: alpha0 for k=0, Gamma_k for k>=1."""
        if k == 0:
            if self.alpha0 is None:
                return CurveFamily()
            return CurveFamily([self.alpha0])
        return self.stages[k - 1].cut_set

    def c_of(self, k: int) -> complex:
        """c_k for k >= 1 (polynomial towers)."""
        return self.stages[k - 1].cn

    def ab_of(self, k: int) -> Tuple[complex, complex]:
        return self.stages[k - 1].ab

    def feeding_param(self, k: int) -> MapParam:
        """R_{k-1}: the straightened map with f_k = j_{k-1} o R_{k-1}."""
        return self.stages[k - 1].param

    def z_ref(self) -> complex:
        """Reference point for branch normalization of polynomial towers.

        1e6 + eta*i with eta raised in steps of 10 until the point clears
        every cut curve by more than 1 (Euclidean); eta starts at 10 when
        any cut hugs the real axis, so that straight routes to real targets
        stay strictly off the axis until their endpoint.
        """
        if self._zref_cache is not None and self._zref_cache[0] == len(self.stages):
            return self._zref_cache[1]
        samples = []
        for k in range(0, len(self.stages) + 1):
            for c in self.stage_cuts(k):
                samples.append(c.array)
        eta = 0.0
        if samples:
            all_pts = np.concatenate(samples)
            if np.abs(all_pts.imag).min() < 1.0:
                eta = 10.0
            while True:
                z = complex(1e6, eta)
                if np.abs(all_pts - z).min() > 1.0:
                    break
                eta += 10.0
        z = complex(1e6, eta)
        self._zref_cache = (len(self.stages), z)
        return z

    def pole_boxes(self) -> CurveFamily:
        """Small closed obstacles around the poles +-1 of rational stages."""
        if self._pole_boxes is None:
            r = POLE_BOX_RADIUS
            boxes = []
            for p in (1.0, -1.0):
                pts = [p + r + r * 1j, p - r + r * 1j, p - r - r * 1j, p + r - r * 1j]
                boxes.append(SampledCurve(pts, closed=True))
            self._pole_boxes = CurveFamily(boxes)
        return self._pole_boxes


# ---------------------------------------------------------------------------
# path machinery
# ---------------------------------------------------------------------------

def densify_route(route: PathRoute, fine_scale: float = 0.1) -> np.ndarray:
    """Sample a route so consecutive points step by at most
    max(2.5*fine_scale, fine_scale*|z|) (relative steps far out, absolute
    steps near the finite structure)."""
    out = [complex(route.waypoints[0])]

    def split(u: complex, v: complex):
        if abs(u - v) <= max(2.5 * fine_scale, fine_scale * min(abs(u), abs(v))):
            out.append(v)
            return
        m = 0.5 * (u + v)
        split(u, m)
        split(m, v)

    for u, v in zip(route.waypoints, route.waypoints[1:]):
        split(complex(u), complex(v))
    return np.array(out, dtype=np.complex128)


def _scan_with_flags(g: np.ndarray, w0: complex) -> Tuple[np.ndarray, np.ndarray]:
    """One nearest-sign scan; returns (values, bad-gap mask of length n-1)."""
    vals, ambig_idx, zero_idx = kernels.sqrt_continue_scan(g, w0, AMBIG_RATIO, ZERO_TOL)
    if zero_idx >= 0:
        raise ZeroCrossing(f"continuation passed within 1e-10 of a branch point "
                           f"(sample {zero_idx})")
    n = g.shape[0]
    bad = np.zeros(max(n - 1, 0), dtype=bool)
    if n > 1:
        w = np.hypot(1.0, np.abs(vals))
        gaps = 2.0 * np.abs(np.diff(vals)) / (w[1:] * w[:-1])
        bad = gaps > STEP_BOUND
        if ambig_idx >= 1:
            bad[ambig_idx - 1] = True
    return vals, bad


class _TowerEvaluator:
    """Continuation engine bound to one tower (stateless between calls)."""

    def __init__(self, tower: Tower):
        self.t = tower

    # -- polynomial -------------------------------------------------------

    def j_path_poly(self, k: int, path: np.ndarray,
                    seed: Optional[complex]) -> np.ndarray:
        """Values of j_k at the points of `path` (which avoids the stage-k
        cuts).  seed = j_k(path[0]), or None when |path[0]| >= R_FARSEED."""
        t = self.t
        if t.degenerate:
            return path.copy()
        if seed is None and abs(path[0]) < R_FARSEED:
            raise ValueError("far seeding needs |path[0]| >= 1e4")
        orig = np.ones(path.shape[0], dtype=bool)
        for _ in range(INTERNAL_HALVINGS + 1):
            g = self._g_values_poly(k, path, seed)
            w0 = seed if seed is not None else _nearest_root(g[0], path[0])
            vals, bad = _scan_with_flags(g, w0)
            if not bad.any():
                return vals[orig]
            ins = np.where(bad)[0]
            mids = 0.5 * (path[ins] + path[ins + 1])
            path = np.insert(path, ins + 1, mids)
            orig = np.insert(orig, ins + 1, False)
        raise AmbiguousStep(int(np.where(bad)[0][0]) + 1,
                            "branch ambiguity survived refinement")

    def _g_values_poly(self, k: int, path: np.ndarray,
                       seed: Optional[complex]) -> np.ndarray:
        """g with j_k = sqrt(g): path^2 - s at the base, f_k - c_k above it.

        Far samples (|z| >= R_ID) take the synthetic value z^2, matching the
        identity branch there; they are never pushed down the tower, which
        caps all magnitudes in the recursion.
        """
        t = self.t
        if k == 0:
            return path * path - t.s
        c_k = t.c_of(k)
        p_feed = t.feeding_param(k)  # p_{c_{k-1}}
        far = np.abs(path) >= R_ID
        g = np.empty(path.shape[0], dtype=np.complex128)
        g[far] = path[far] * path[far]
        if far.all():
            return g
        near_idx = np.where(~far)[0]
        runs = _contiguous_runs(near_idx)
        for i0, i1 in runs:
            sub = path[i0:i1 + 1]
            pushed = sub * sub + p_feed.c
            if i0 == 0 and seed is not None:
                sub_seed = seed * seed + c_k  # f_k(path[0]) = j_k(path[0])^2 + c_k
            else:
                sub_seed = None  # |pushed[0]| is far by construction
            fvals = self.j_path_poly(k - 1, pushed, sub_seed)
            g[i0:i1 + 1] = fvals - c_k
        return g

    # -- rational ---------------------------------------------------------

    def j_path_rat(self, k: int, path: np.ndarray, seed: complex) -> np.ndarray:
        """Values of j_k along `path` with a known seed at path[0].

        path[0] may be a pole (+-1 at stage level, producing f_k = inf);
        the defining ratio has a removable limit there, so only the head
        sample may be polar.
        """
        t = self.t
        if t.degenerate:
            return path.copy()
        orig = np.ones(path.shape[0], dtype=bool)
        for _ in range(INTERNAL_HALVINGS + 1):
            g = self._g_values_rat(k, path)
            vals, bad = _scan_with_flags(g, seed)
            if not bad.any():
                return vals[orig]
            ins = np.where(bad)[0]
            mids = 0.5 * (path[ins] + path[ins + 1])
            path = np.insert(path, ins + 1, mids)
            orig = np.insert(orig, ins + 1, False)
        raise AmbiguousStep(int(np.where(bad)[0][0]) + 1,
                            "branch ambiguity survived refinement")

    def _g_values_rat(self, k: int, path: np.ndarray) -> np.ndarray:
        t = self.t
        if k == 0:
            return (path * path - t.s) / t.rat_normalizer
        a_k, b_k = t.ab_of(k)
        r_feed: RatParam = t.feeding_param(k)
        w2 = path * path
        den = w2 - 1.0
        polar = den == 0
        if polar[1:].any():
            raise OnCutCurve(k, "continuation path passes through a pole")
        pushed = np.empty_like(path)
        safe = ~polar
        pushed[safe] = (r_feed.a * w2[safe] - r_feed.b) / den[safe]
        if polar[0]:
            fvals_tail = self._f_values_rat_path(k - 1, pushed[1:])
            g = np.empty(path.shape[0], dtype=np.complex128)
            g[0] = 1.0  # limit of (F-b)/(F-a) as F -> inf
            g[1:] = _moebius_ab(fvals_tail, a_k, b_k)
            return g
        fvals = self._f_values_rat_path(k - 1, pushed)
        return _moebius_ab(fvals, a_k, b_k)

    def _f_values_rat_path(self, k: int, pushed: np.ndarray) -> np.ndarray:
        """j_k along an arbitrary finite path: prepend a connector from the
        stage anchor so the seed value is known."""
        t = self.t
        if t.degenerate:
            return pushed.copy()
        if pushed.shape[0] == 0:
            return pushed.copy()
        anchor, aval = self._rat_anchor(k)
        conn = self._connector(k, anchor, complex(pushed[0]))
        full = np.concatenate([conn, pushed])
        vals = self.j_path_rat(k, full, aval)
        return vals[conn.shape[0]:]

    def _rat_anchor(self, k: int) -> Tuple[complex, complex]:
        t = self.t
        if k == 0:
            return (1.0 + 0j, 1.0 + 0j)
        st = t.stages[k - 1]
        if st.anchor is None:
            raise ValueError(f"stage {k} has no bootstrapped anchor")
        return (st.anchor, st.anchor_value)

    def _route_obstacles(self, k: int, endpoints: Tuple[complex, ...],
                         poles: bool) -> CurveFamily:
        """Stage cuts plus a box shielding the origin (the unique finite
        branch point of every j_n: f_n - c_n has a double zero at 0, and a
        nearest-sign scan can pass an even-order zero without noticing the
        sign flip).  The box shrinks when cuts or route endpoints crowd 0."""
        t = self.t
        cuts = t.stage_cuts(k)
        obstacles = list(cuts)
        r0 = 0.25
        if len(cuts):
            r0 = min(r0, 0.49 * point_family_distance(0.0, cuts))
        for e in endpoints:
            r0 = min(r0, 0.49 * abs(e))
        if r0 > 1e-8:
            obstacles.append(SampledCurve(
                [complex(r0, r0), complex(-r0, r0), complex(-r0, -r0),
                 complex(r0, -r0)], closed=True))
        if poles:
            for box, pole in zip(t.pole_boxes(), (1.0, -1.0)):
                # skip a box when a route endpoint sits in or near it
                if any(abs(e - pole) < 2.0 * POLE_BOX_RADIUS for e in endpoints):
                    continue
                obstacles.append(box)
        return CurveFamily(obstacles)

    def _connector(self, k: int, frm: complex, to: complex) -> np.ndarray:
        """Densified route from the stage-k anchor to `to`, excluding `to`."""
        t = self.t
        if abs(frm - to) < 1e-12:
            return np.array([frm], dtype=np.complex128)
        fam = self._route_obstacles(k, (frm, to), poles=True)
        try:
            route = route_path(frm, to, fam)
        except (ValueError, Unroutable):
            # endpoint sits inside an obstacle box; retry with cuts only
            route = route_path(frm, to, t.stage_cuts(k))
        path = densify_route(route, fine_scale=0.08)
        return path[:-1]

    # -- shared entry points ----------------------------------------------

    def eval_j(self, n: int, w: ExtComplex) -> ExtComplex:
        t = self.t
        if w.is_inf:
            return INF
        if t.degenerate:
            return w
        z = w.value
        cuts = t.stage_cuts(n)
        if len(cuts) and point_family_distance(z, cuts) < CUT_CLEARANCE:
            raise OnCutCurve(n)
        if n >= 1 and z == 0:
            return ExtComplex(0.0)  # j_n(0) = 0: f_n(0) is the extracted critical value
        if t.kind == "rat" and z in (1.0, -1.0):
            return ExtComplex(z)  # normalization j_n(1)=1 and oddness
        if t.kind == "poly":
            zr = t.z_ref()
            fam = self._route_obstacles(n, (z,), poles=False)
            try:
                route = route_path(zr, z, fam)
            except (ValueError, Unroutable):
                route = route_path(zr, z, cuts)
            path = densify_route(route)
            vals = self.j_path_poly(n, path, None)
            return ExtComplex(complex(vals[-1]))
        anchor, aval = self._rat_anchor(n)
        conn = self._connector(n, anchor, z)
        path = np.concatenate([conn, np.array([z], dtype=np.complex128)])
        vals = self.j_path_rat(n, path, aval)
        return ExtComplex(complex(vals[-1]))

    def eval_f(self, n: int, z: ExtComplex) -> ExtComplex:
        t = self.t
        if n < 1 or n > t.n_stages():
            raise ValueError(f"stage index {n} outside 1..{t.n_stages()}")
        if not z.is_inf and not t.degenerate:
            cuts = t.stage_cuts(n)
            if len(cuts) and point_family_distance(z.value, cuts) < CUT_CLEARANCE:
                raise OnCutCurve(n)
        w = eval_map(t.feeding_param(n), z)
        return self.eval_j(n - 1, w)


def _moebius_ab(F: np.ndarray, a: complex, b: complex) -> np.ndarray:
    """(F - b)/(F - a) with the removable value 1 at F = inf."""
    out = np.empty(F.shape[0], dtype=np.complex128)
    finite = np.isfinite(F)
    out[~finite] = 1.0
    out[finite] = (F[finite] - b) / (F[finite] - a)
    return out


def _nearest_root(g0: complex, ref: complex) -> complex:
    r = np.sqrt(complex(g0))
    return complex(r) if abs(r - ref) <= abs(r + ref) else complex(-r)


def _contiguous_runs(idx: np.ndarray) -> List[Tuple[int, int]]:
    if idx.size == 0:
        return []
    breaks = np.where(np.diff(idx) > 1)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [idx.size - 1]])
    return [(int(idx[s]), int(idx[e])) for s, e in zip(starts, ends)]


# ---------------------------------------------------------------------------
# public evaluation API
# ---------------------------------------------------------------------------

def eval_tower_j(tower: Tower, n: int, w: Pointlike) -> ExtComplex:
    """Value of the stage-n square-root branch j_n at w.

    n = 0 is the closed-form base branch cut along alpha0; n >= 1 requires
    the tower to hold at least n stages.  Raises OnCutCurve when w is within
    1e-9 of the stage cut set, Unroutable / AmbiguousStep on continuation
    failures.
    """
    if n < 0 or n > tower.n_stages():
        raise ValueError(f"stage index {n} outside 0..{tower.n_stages()}")
    return _TowerEvaluator(tower).eval_j(n, ext(w))


def eval_tower_f(tower: Tower, n: int, z: Pointlike) -> ExtComplex:
    """Value of the stage-n tower function f_n = j_{n-1} o R_{n-1} at z."""
    return _TowerEvaluator(tower).eval_f(n, ext(z))


def eval_phi(tower: Tower, n: int, z: Pointlike) -> ExtComplex:
    """The partial conjugacy Phi_n = j_n o ... o j_1 o j applied to z.

    Failures carry the stage index at which the composition left the domain.
    """
    ev = _TowerEvaluator(tower)
    u = ext(z)
    for k in range(0, n + 1):
        try:
            u = ev.eval_j(k, u)
        except OnCutCurve as exc:
            raise OnCutCurve(k, f"composition left the domain at stage {k}") from exc
    return u


def estimate_phi_convergence(tower: Tower, probes: Sequence[Pointlike],
                             n_max: int) -> List[float]:
    """Sup over probes of chordal(Phi_{n+1}(z), Phi_n(z)) for n < n_max.

    A summable tail is the Cauchy evidence for uniform convergence of the
    partial conjugacies (the strong form of the regluing).
    """
    if n_max < 0 or n_max > tower.n_stages() - 1:
        if n_max != 0:
            raise ValueError("n_max exceeds available stages")
    if n_max == 0:
        return []
    ev = _TowerEvaluator(tower)
    sups = [0.0] * n_max
    for p in probes:
        u = ext(p)
        chain = []
        for k in range(0, n_max + 1):
            u = ev.eval_j(k, u)
            chain.append(u)
        for n in range(n_max):
            d = chordal_distance(chain[n + 1], chain[n])
            if d > sups[n]:
                sups[n] = d
    return sups


def bootstrap_rat_anchor(tower: Tower, k: int) -> None:
    """Choose a generic anchor for stage k of a rational tower and store its
    branch value, obtained by continuation from the normalization point 1."""
    if tower.degenerate:
        st = tower.stages[k - 1]
        st.anchor = _ANCHOR_CANDIDATES[0]
        st.anchor_value = _ANCHOR_CANDIDATES[0]
        return
    ev = _TowerEvaluator(tower)
    cuts = tower.stage_cuts(k)
    last_err: Optional[Exception] = None
    for cand in _ANCHOR_CANDIDATES:
        if abs(cand - 1.0) < 0.3 or abs(cand + 1.0) < 0.3:
            continue
        if len(cuts) and point_family_distance(cand, cuts) < 0.05:
            continue
        try:
            val = _continue_from_one(ev, k, cand)
        except (Unroutable, AmbiguousStep, ZeroCrossing, OnCutCurve) as exc:
            last_err = exc
            continue
        st = tower.stages[k - 1]
        st.anchor = cand
        st.anchor_value = val
        return
    raise Unroutable(f"no generic anchor reachable for stage {k}: {last_err}")


def _continue_from_one(ev: _TowerEvaluator, k: int, target: complex) -> complex:
    """j_k(target) by continuation from the normalization point 1."""
    t = ev.t
    cuts = t.stage_cuts(k)
    start = None
    for d in (0.01 + 0.01j, 0.01 - 0.01j, -0.01 + 0.01j, 0.015j, -0.015j):
        cand = 1.0 + d
        if not len(cuts) or not segment_crosses_family(1.0, cand, cuts, tol=CUT_CLEARANCE):
            if point_family_distance(cand, cuts) > CUT_CLEARANCE or not len(cuts):
                start = cand
                break
    if start is None:
        raise Unroutable("cannot leave the normalization point 1")
    obstacles = ev._route_obstacles(k, (start, target), poles=True)
    try:
        route = route_path(start, target, obstacles)
    except (ValueError, Unroutable):
        route = route_path(start, target, cuts)
    tail = densify_route(route, fine_scale=0.08)
    path = np.concatenate([np.array([1.0 + 0j]), tail])
    vals = ev.j_path_rat(k, path, 1.0 + 0j)
    return complex(vals[-1])


def continuation_loop_value(tower: Tower, n: int, loop: Sequence[complex],
                            seed_value: Optional[complex] = None) -> Tuple[complex, complex]:
    """Continue j_n around a closed sample loop; returns (start, end) branch
    values.  Equal values (within tolerance) certify trivial monodromy."""
    pts = np.array([complex(ext(p).value) for p in loop], dtype=np.complex128)
    if abs(pts[0] - pts[-1]) > 1e-12:
        pts = np.append(pts, pts[0])
    ev = _TowerEvaluator(tower)
    if seed_value is None:
        seed_value = complex(eval_tower_j(tower, n, complex(pts[0])).value)
    if tower.kind == "poly":
        vals = ev.j_path_poly(n, pts, seed_value)
    else:
        vals = ev.j_path_rat(n, pts, seed_value)
    return complex(vals[0]), complex(vals[-1])
