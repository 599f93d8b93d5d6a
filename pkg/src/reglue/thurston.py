"""Generalized Thurston iteration for quadratic regluing towers.

Each step straightens the current partially-defined map to an honest
quadratic (p_{c_n} or R_{a_n,b_n} through the critical values), lifts the
truncated critical orbit through the square-root branch j_n, and pulls the
cut curves back.  The parameter sequence c_n (or (a_n, b_n)) converging is
the weak form of the regluing; the report records the full per-stage
diagnostics either way.

Orbit indexing: state.orbit[m-1] holds f_n^{o m}(0) (so orbit[0] is the
stage parameter).  Orbit entries live on the sphere; escaping orbits carry
the point at infinity, which every branch fixes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace as _dc_replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .branch import Tower, TowerStage, bootstrap_rat_anchor, eval_tower_j
from .errors import (AmbiguousStep, CriticalValueOnCurve, CutCollision,
                     DegenerateNormalizer, Inadmissible, OnCutCurve,
                     OrbitDegeneracy, OrbitExhausted, ReglueError, Unroutable,
                     ZeroCrossing)
from .families import (PolyParam, RatParam, eval_map, eval_poly, eval_rat,
                       pullback_family)
from .sphere import (INF, CurveFamily, ExtComplex, SampledCurve,
                     chordal_distance, curve_diameter, ext)
from ._backend import kernels

DEFAULT_TOL = 1e-12
DIVERGENCE_RADIUS = 1e8
ADMISSIBLE_CLEARANCE = 1e-6
PERIOD_TOL = 1e-9
MAX_PERIOD = 8
DEFAULT_CUT_CAP = 16

CONVENTION_COMPOSE = "compose-forward"     # f_{n+1} = j_n o R_n
CONVENTION_MISPRINT = "inverse-misprint"   # deliberate arbitration hook


def closed_form_example(n: int) -> complex:
    """Closed-form stage parameter of the bundled z^2-6 regluing example:
    c_n = -2^(1 - 1/2^n) * 3^(1/2^n), decreasing to -2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    e = 2.0 ** (-n)
    return complex(-(2.0 ** (1.0 - e)) * (3.0 ** e))


def _orbit_chordal(a: ExtComplex, b: ExtComplex) -> float:
    return chordal_distance(a, b)


def _point_curve_chordal_lb(p: ExtComplex, curve: SampledCurve) -> float:
    """Conservative lower bound for the chordal distance from p to a curve."""
    arr = curve.array
    wmax = float(np.hypot(1.0, np.abs(arr)).max())
    if p.is_inf:
        return float((2.0 / np.hypot(1.0, np.abs(arr))).min())
    from .sphere import point_curve_distance

    d_euc = point_curve_distance(p, curve)
    return 2.0 * d_euc / (math.hypot(1.0, abs(p.value)) * wmax)


def _check_admissible_orbit(step, start: ExtComplex, curve: SampledCurve,
                            n_check: int) -> None:
    """Forward orbit of `start` must stay clear of the curve."""
    w = start
    for n in range(1, n_check + 1):
        w = step(w)
        if w.is_inf:
            d = _point_curve_chordal_lb(w, curve)
            if d <= ADMISSIBLE_CLEARANCE:
                raise Inadmissible(n, d)
            break  # infinity is fixed for our maps' escaping orbits
        d = _point_curve_chordal_lb(w, curve)
        if d <= ADMISSIBLE_CLEARANCE:
            raise Inadmissible(n, d)
        if abs(w.value) > 1e50:
            w = INF


def _iterate_orbit(step, start: ExtComplex, count: int) -> List[ExtComplex]:
    """[f(start), f^2(start), ..., f^count(start)] with overflow capping.

    Once the recent tail repeats with period <= 8 (within 1e-9), the rest of
    the orbit is filled by cycling instead of iterating further: forward
    iteration through a repelling cycle amplifies rounding exponentially,
    while the detected cycle is accurate at detection time."""
    out: List[ExtComplex] = []
    w = start
    for _ in range(count):
        w = step(w)
        if not w.is_inf and abs(w.value) > 1e100:
            w = INF
        out.append(w)
        n = len(out)
        for p in range(1, MAX_PERIOD + 1):
            if n >= 2 * p and all(
                    _orbit_chordal(out[-i], out[-i - p]) < PERIOD_TOL
                    for i in range(1, p + 1)):
                cycle = out[n - p:]
                k = 0
                while len(out) < count:
                    out.append(cycle[k % p])
                    k += 1
                return out
    return out


def _extend_periodic(orbit: List[ExtComplex]) -> Optional[ExtComplex]:
    """Next entry when the orbit tail is 1e-9 periodic with period <= 8."""
    n = len(orbit)
    for p in range(1, MAX_PERIOD + 1):
        if n < 2 * p:
            break
        if all(_orbit_chordal(orbit[-i], orbit[-i - p]) < PERIOD_TOL
               for i in range(1, p + 1)):
            return orbit[n - p]
    return None


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass
class PolyState:
    """Stage-n state of a polynomial run.

    orbit[m-1] = f_n^(o m)(0); orbit[0] equals c_n.  history collects
    c_0..c_n.  cut_set is Gamma_n (empty once tracking is capped)."""

    n: int
    c_n: ExtComplex
    orbit: Tuple[ExtComplex, ...]
    cut_set: CurveFamily
    history: Tuple[ExtComplex, ...]
    tower: Tower
    cuts_tracked: bool = True
    orbit_drift: Optional[float] = None
    convention: str = CONVENTION_COMPOSE


@dataclass
class RatState:
    """Stage-n state of a rational run, with both critical orbits."""

    n: int
    a_n: ExtComplex
    b_n: ExtComplex
    orbit0: Tuple[ExtComplex, ...]
    orbit_inf: Tuple[ExtComplex, ...]
    cut_set: CurveFamily
    history: Tuple[Tuple[ExtComplex, ExtComplex], ...]
    tower: Tower
    cuts_tracked: bool = True
    orbit_drift: Optional[float] = None
    convention: str = CONVENTION_COMPOSE


# ---------------------------------------------------------------------------
# polynomial runs
# ---------------------------------------------------------------------------

def init_poly(c, alpha0: Optional[SampledCurve], M: int = 20,
              N_check: int = 100, convention: str = CONVENTION_COMPOSE) -> PolyState:
    """Build the stage-1 state for regluing p_c along alpha0.

    alpha0=None requests the degenerate identity regluing (endpoint 0; the
    branch is the identity and the run reproduces c at every stage).
    """
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    if alpha0 is not None:
        if not alpha0.symmetric:
            raise ValueError("alpha0 must be symmetric (point(-t) = -point(t))")
        endpoint = alpha0.endpoint
        if abs(endpoint.value) < 1e-12:
            raise ValueError("pass alpha0=None for the degenerate endpoint-0 regluing")
        _check_admissible_orbit(lambda w: eval_poly(p, w), endpoint, alpha0, N_check)
        s = endpoint.value ** 2
    else:
        endpoint = ExtComplex(0.0)
        s = 0.0

    tower = Tower("poly", p, alpha0, s)
    c0 = complex(s + p.c)
    r0 = PolyParam(c0)

    orbit_f = _iterate_orbit(lambda w: eval_poly(p, w), endpoint, M)
    orbit1 = tuple(eval_tower_j(tower, 0, w) for w in orbit_f)
    c1 = orbit1[0]
    if c1.is_inf:
        raise OrbitDegeneracy("stage-1 parameter is the point at infinity")

    if alpha0 is not None:
        cuts = pullback_family(r0, CurveFamily([alpha0]))
        _assert_disjoint(cuts)
    else:
        cuts = CurveFamily()
    tower.append_stage(TowerStage(param=r0, cut_set=cuts, cn=complex(c1.value)))
    return PolyState(n=1, c_n=c1, orbit=orbit1, cut_set=cuts,
                     history=(ExtComplex(c0), c1), tower=tower,
                     convention=convention)


def _pick_sign(r: complex, prev: ExtComplex, full_value: Optional[ExtComplex],
               flip: bool) -> complex:
    """Sign the principal root r against the previous-stage value or the
    continued branch value."""
    if full_value is not None:
        v = full_value.value
        s = 1.0 if abs(v - r) <= abs(v + r) else -1.0
    else:
        q = prev.value
        dp, dm = abs(r - q), abs(r + q)
        s = 1.0 if dp <= dm else -1.0
    if flip:
        s = -s
    return s * r


def _needs_full(r: complex, prev: ExtComplex) -> bool:
    if prev.is_inf:
        return False
    q = prev.value
    dp, dm = abs(r - q), abs(r + q)
    lo, hi = min(dp, dm), max(dp, dm)
    return hi < 2.0 * lo


def step_poly(state: PolyState, cut_cap: int = DEFAULT_CUT_CAP) -> PolyState:
    """One Thurston step: lift the orbit through j_n and pull the cuts back.

    Branch signs are fixed by full continuation for n <= 2 and by the
    nearest-to-previous-stage heuristic afterwards, falling back to full
    continuation whenever the two candidate roots are within a factor 2 of
    equidistant (and the cut data needed for routing is still tracked).
    """
    orbit = list(state.orbit)
    extended = _extend_periodic(orbit)
    if extended is not None:
        orbit.append(extended)
    if len(orbit) < 2:
        raise OrbitExhausted(
            f"orbit has {len(orbit)} entries at stage {state.n}; increase the budget")

    n = state.n
    t = state.tower
    c_n = state.c_n
    flip = state.convention == CONVENTION_MISPRINT
    new: List[ExtComplex] = []
    for m in range(len(orbit) - 1):
        om, om1 = orbit[m], orbit[m + 1]
        if om.is_inf or om1.is_inf:
            new.append(INF)
            continue
        if abs(om.value) < 1e-300:
            new.append(ExtComplex(0.0))
            continue
        g = om1.value - c_n.value
        if abs(g) < 1e-30:
            raise OrbitDegeneracy(
                f"orbit entry {m + 1} of stage {n} equals the critical value")
        r = cmath.sqrt(g)
        use_full = n <= 2 or _needs_full(r, om)
        full_val = None
        if use_full and state.cuts_tracked:
            full_val = eval_tower_j(t, n, om)
        new.append(ExtComplex(_pick_sign(r, om, full_val, flip)))

    c_next = new[0]
    if c_next.is_inf:
        raise OrbitDegeneracy("next stage parameter is the point at infinity")

    drift = max((_orbit_chordal(a, b) for a, b in zip(new, orbit)), default=0.0)

    track = state.cuts_tracked and (n + 1) <= cut_cap and not t.degenerate
    if track and len(state.cut_set):
        r_n = PolyParam(complex(c_n.value))
        cuts = pullback_family(r_n, state.cut_set)
        _assert_disjoint(cuts)
    else:
        cuts = CurveFamily()
        track = track and t.degenerate  # degenerate towers stay "tracked" (no cuts exist)

    t.append_stage(TowerStage(param=PolyParam(complex(c_n.value)),
                              cut_set=cuts, cn=complex(c_next.value)))
    return PolyState(n=n + 1, c_n=c_next, orbit=tuple(new), cut_set=cuts,
                     history=state.history + (c_next,), tower=t,
                     cuts_tracked=track or (t.degenerate),
                     orbit_drift=drift, convention=state.convention)


def _assert_disjoint(family: CurveFamily, tol: float = 1e-9) -> None:
    """Pairwise disjointness of cut curves: bounding-interval sweep, then an
    exact min-distance check on the surviving pairs."""
    n = len(family)
    if n < 2:
        return
    arrs = [c.array for c in family.curves]
    lo = np.array([a.real.min() for a in arrs])
    hi = np.array([a.real.max() for a in arrs])
    ilo = np.array([a.imag.min() for a in arrs])
    ihi = np.array([a.imag.max() for a in arrs])
    order = np.argsort(lo, kind="stable")
    margin = tol * 2
    active: List[int] = []
    for oi in order:
        x = lo[oi] - margin
        active = [j for j in active if hi[j] >= x]
        for j in active:
            if ilo[oi] > ihi[j] + margin or ilo[j] > ihi[oi] + margin:
                continue
            d = kernels.min_cross_chordal(arrs[oi], arrs[j])
            if d <= tol:
                raise CutCollision(
                    "cut curves %d and %d are not disjoint (gap %.3e)"
                    % (int(j), int(oi), d))
            de = kernels.polylines_min_dist(
                np.ascontiguousarray(arrs[oi].real), np.ascontiguousarray(arrs[oi].imag),
                family.curves[oi].closed,
                np.ascontiguousarray(arrs[j].real), np.ascontiguousarray(arrs[j].imag),
                family.curves[j].closed)
            if de <= tol:
                raise CutCollision(
                    "cut curves %d and %d intersect (gap %.3e)" % (int(j), int(oi), de))
        active.append(int(oi))


# ---------------------------------------------------------------------------
# rational runs
# ---------------------------------------------------------------------------

def init_rat(r, alpha0: Optional[SampledCurve], M: int = 20,
             N_check: int = 100, convention: str = CONVENTION_COMPOSE) -> RatState:
    """Stage-1 state for regluing R_{a,b} along alpha0.

    Requires the orbits of both 1 and alpha0(1) to stay clear of the path
    (the orbit of 1 covers the critical orbit of infinity since f(1)=inf),
    and a non-vanishing branch normalizer 1 - alpha0(1)^2.
    """
    rp = r if isinstance(r, RatParam) else RatParam(*r)
    if alpha0 is not None:
        if not alpha0.symmetric:
            raise ValueError("alpha0 must be symmetric (point(-t) = -point(t))")
        endpoint = alpha0.endpoint
        s = endpoint.value ** 2
        if abs(1.0 - s) < 1e-10:
            raise DegenerateNormalizer(
                "alpha0(1)^2 is within 1e-10 of 1; the branch cannot be normalized at 1")
        _check_admissible_orbit(lambda w: eval_rat(rp, w), ExtComplex(1.0),
                                alpha0, N_check)
        _check_admissible_orbit(lambda w: eval_rat(rp, w), endpoint, alpha0, N_check)
    else:
        endpoint = ExtComplex(0.0)
        s = 0.0

    tower = Tower("rat", rp, alpha0, s)
    a_img = eval_rat(rp, INF)          # = a
    b_img = eval_rat(rp, endpoint)     # = f(alpha0(1))
    if a_img.is_inf or b_img.is_inf:
        raise OrbitDegeneracy("straightened critical values must be finite")
    if abs(a_img.value - b_img.value) < 1e-12:
        raise OrbitDegeneracy("straightened critical values coincide")
    r0 = RatParam(a_img.value, b_img.value)

    orbit0_f = _iterate_orbit(lambda w: eval_rat(rp, w), endpoint, M)
    orbitinf_f = _iterate_orbit(lambda w: eval_rat(rp, w), INF, M)
    orbit0 = tuple(eval_tower_j(tower, 0, w) for w in orbit0_f)
    orbit_inf = tuple(eval_tower_j(tower, 0, w) for w in orbitinf_f)
    a1, b1 = orbit_inf[0], orbit0[0]
    if a1.is_inf or b1.is_inf or abs(a1.value - b1.value) < 1e-12:
        raise OrbitDegeneracy("stage-1 critical values degenerate")

    if alpha0 is not None:
        cuts = pullback_family(r0, CurveFamily([alpha0]))
        _assert_disjoint(cuts)
    else:
        cuts = CurveFamily()
    tower.append_stage(TowerStage(param=r0, cut_set=cuts,
                                  ab=(complex(a1.value), complex(b1.value))))
    bootstrap_rat_anchor(tower, 1)
    return RatState(n=1, a_n=a1, b_n=b1, orbit0=orbit0, orbit_inf=orbit_inf,
                    cut_set=cuts, history=((a1, b1),), tower=tower,
                    convention=convention)


def advance_orbit_rat(orbit: Sequence[ExtComplex], a_n: ExtComplex,
                      b_n: ExtComplex, stage: int, tower: Optional[Tower],
                      cuts_tracked: bool, flip: bool = False) -> List[ExtComplex]:
    """Lift one critical orbit through j_n = sqrt((f_n - b_n)/(f_n - a_n)).

    The branch fixes 0 and infinity exactly; entries colliding with a_n, b_n
    or the points +-1 (within 1e-10) signal a degeneracy.
    """
    new: List[ExtComplex] = []
    for m in range(len(orbit) - 1):
        om, om1 = orbit[m], orbit[m + 1]
        if om.is_inf:
            new.append(INF)
            continue
        if abs(om.value) < 1e-300:
            new.append(ExtComplex(0.0))
            continue
        if abs(om.value - 1.0) < 1e-10 or abs(om.value + 1.0) < 1e-10:
            raise OrbitDegeneracy(
                f"orbit entry {m + 1} of stage {stage} hits a pole (+-1)")
        if om1.is_inf:
            raise OrbitDegeneracy(
                f"orbit entry {m + 2} of stage {stage} is infinite off the poles")
        if chordal_distance(om1, a_n) < 1e-10:
            raise OrbitDegeneracy(
                f"orbit entry {m + 2} of stage {stage} collides with a_n")
        if chordal_distance(om1, b_n) < 1e-10:
            raise OrbitDegeneracy(
                f"orbit entry {m + 2} of stage {stage} collides with b_n")
        g = (om1.value - b_n.value) / (om1.value - a_n.value)
        r = cmath.sqrt(g)
        use_full = stage <= 2 or _needs_full(r, om)
        full_val = None
        if use_full and cuts_tracked and tower is not None:
            full_val = eval_tower_j(tower, stage, om)
        new.append(ExtComplex(_pick_sign(r, om, full_val, flip)))
    return new


def step_rat(state: RatState, cut_cap: int = DEFAULT_CUT_CAP) -> RatState:
    """One Thurston step for the rational family."""
    orbit0 = list(state.orbit0)
    orbit_inf = list(state.orbit_inf)
    for orb in (orbit0, orbit_inf):
        extended = _extend_periodic(orb)
        if extended is not None:
            orb.append(extended)
    if len(orbit0) < 2 or len(orbit_inf) < 2:
        raise OrbitExhausted(
            f"orbits have {len(orbit0)}/{len(orbit_inf)} entries at stage {state.n}")

    n, t = state.n, state.tower
    flip = state.convention == CONVENTION_MISPRINT
    new0 = advance_orbit_rat(orbit0, state.a_n, state.b_n, n, t,
                             state.cuts_tracked, flip)
    new_inf = advance_orbit_rat(orbit_inf, state.a_n, state.b_n, n, t,
                                state.cuts_tracked, flip)
    a_next, b_next = new_inf[0], new0[0]
    if a_next.is_inf or b_next.is_inf:
        raise OrbitDegeneracy("next critical values are infinite")
    if abs(a_next.value - b_next.value) < 1e-12:
        raise OrbitDegeneracy("next critical values coincide")

    drift0 = max((_orbit_chordal(a, b) for a, b in zip(new0, orbit0)), default=0.0)
    drift1 = max((_orbit_chordal(a, b) for a, b in zip(new_inf, orbit_inf)), default=0.0)

    track = state.cuts_tracked and (n + 1) <= cut_cap and not t.degenerate
    r_n = RatParam(complex(state.a_n.value), complex(state.b_n.value))
    if track and len(state.cut_set):
        cuts = pullback_family(r_n, state.cut_set)
        _assert_disjoint(cuts)
    else:
        cuts = CurveFamily()
        track = track and t.degenerate

    t.append_stage(TowerStage(param=r_n, cut_set=cuts,
                              ab=(complex(a_next.value), complex(b_next.value))))
    if (track or t.degenerate) and len(t.stages) <= cut_cap:
        bootstrap_rat_anchor(t, n + 1)
    return RatState(n=n + 1, a_n=a_next, b_n=b_next, orbit0=tuple(new0),
                    orbit_inf=tuple(new_inf), cut_set=cuts,
                    history=state.history + ((a_next, b_next),), tower=t,
                    cuts_tracked=track or t.degenerate,
                    orbit_drift=max(drift0, drift1), convention=state.convention)


# ---------------------------------------------------------------------------
# reports and run drivers
# ---------------------------------------------------------------------------

@dataclass
class RegluingReport:
    """Outcome of a regluing run with per-stage diagnostics."""

    status: str
    kind: str
    convention: str
    limit: Optional[object]
    stages: List[dict]
    config: dict
    error: Optional[str] = None
    phi_deviations: Optional[List[float]] = None
    cut_note: Optional[str] = None

    def to_json(self) -> str:
        doc = {
            "status": self.status,
            "kind": self.kind,
            "convention": self.convention,
            "limit": _limit_doc(self.limit),
            "config": self.config,
            "stages": self.stages,
        }
        if self.error is not None:
            doc["error"] = self.error
        if self.cut_note is not None:
            doc["cut_note"] = self.cut_note
        if self.phi_deviations is not None:
            doc["phi_deviations"] = self.phi_deviations
        return _format_json(doc) + "\n"


def _limit_doc(limit):
    if limit is None:
        return None
    if isinstance(limit, tuple):
        return {"a": _num_doc(limit[0]), "b": _num_doc(limit[1])}
    return _num_doc(limit)


def _num_doc(v):
    v = ext(v)
    if v.is_inf:
        return "inf"
    return [v.value.real, v.value.imag]


def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return '"%s"' % x
    return "%.17g" % x


def _format_json(obj, indent: int = 0) -> str:
    """Canonical JSON text: insertion-ordered keys, floats at 17 significant
    digits, two-space indent.  Byte-stable across runs."""
    pad = "  " * indent
    pad2 = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return '"%s"' % obj.replace("\\", "\\\\").replace('"', '\\"')
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [pad2 + '"%s": %s' % (k, _format_json(v, indent + 1))
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [pad2 + _format_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _replace_state(state, **kw):
    return _dc_replace(state, **kw)


def _stage_row_poly(state: PolyState, delta: Optional[float]) -> dict:
    row = {
        "n": state.n,
        "c": _num_doc(state.c_n),
        "delta": delta,
        "cut_count": len(state.cut_set) if state.cuts_tracked else None,
        "max_cut_diameter": (max((curve_diameter(c) for c in state.cut_set), default=0.0)
                             if state.cuts_tracked and len(state.cut_set) else
                             (0.0 if state.cuts_tracked else None)),
        "orbit_drift": state.orbit_drift,
    }
    return row


def _stage_row_rat(state: RatState, delta: Optional[float]) -> dict:
    return {
        "n": state.n,
        "a": _num_doc(state.a_n),
        "b": _num_doc(state.b_n),
        "delta": delta,
        "cut_count": len(state.cut_set) if state.cuts_tracked else None,
        "max_cut_diameter": (max((curve_diameter(c) for c in state.cut_set), default=0.0)
                             if state.cuts_tracked and len(state.cut_set) else
                             (0.0 if state.cuts_tracked else None)),
        "orbit_drift": state.orbit_drift,
    }


def run_poly(c, alpha0: Optional[SampledCurve], tol: float = 1e-10,
             max_stages: int = 30, M: int = 20, N_check: int = 100,
             cut_cap: int = DEFAULT_CUT_CAP,
             convention: str = CONVENTION_COMPOSE,
             config_extra: Optional[dict] = None) -> RegluingReport:
    """Run the polynomial iteration to convergence, divergence, or budget.

    Converged means the last three parameter increments were all below tol;
    diverged means |c_n| escaped past 1e8.  Stage errors surface as status
    "ambiguous" with the failing stage recorded.
    """
    p = c if isinstance(c, PolyParam) else PolyParam(c)
    config = {
        "kind": "poly",
        "c": [p.c.real, p.c.imag],
        "alpha0": _alpha0_doc(alpha0),
        "tol": float(tol),
        "max_stages": int(max_stages),
        "orbit_len": int(M),
        "n_check": int(N_check),
        "cut_cap": int(cut_cap),
        "convention": convention,
    }
    if config_extra:
        config.update(config_extra)

    if max_stages < 1:
        return RegluingReport(status="budget-exhausted", kind="poly",
                              convention=convention, limit=None, stages=[],
                              config=config)

    state = init_poly(p, alpha0, M=M, N_check=N_check, convention=convention)
    rows = [_stage_row_poly(state, None)]
    deltas: List[float] = []
    status = "budget-exhausted"
    error = None
    cut_note = None
    states = [state]
    while state.n < max_stages:
        prev_c = state.c_n
        try:
            state = step_poly(state, cut_cap=cut_cap)
        except (CriticalValueOnCurve, CutCollision, AmbiguousStep) as exc:
            if state.n >= 3 and state.cuts_tracked:
                # the cut curves have crowded the critical value to within
                # the pullback clearance; the parameter iteration itself only
                # needs the orbit recursion, so stop tracking and continue
                cut_note = (f"cut tracking stopped before stage {state.n + 1}: "
                            f"{type(exc).__name__}: {exc}")
                state = _replace_state(state, cuts_tracked=False)
                continue
            status = "ambiguous"
            error = f"stage {state.n + 1}: {type(exc).__name__}: {exc}"
            break
        except ReglueError as exc:
            status = "ambiguous"
            error = f"stage {state.n + 1}: {type(exc).__name__}: {exc}"
            break
        states.append(state)
        if state.c_n.is_inf or prev_c.is_inf:
            delta = math.inf
        else:
            delta = abs(state.c_n.value - prev_c.value)
        rows.append(_stage_row_poly(state, delta))
        if state.c_n.is_inf or abs(state.c_n) > DIVERGENCE_RADIUS:
            status = "diverged"
            break
        deltas.append(delta)
        if len(deltas) >= 3 and all(d < tol for d in deltas[-3:]):
            status = "converged"
            break

    limit = state.c_n if not state.c_n.is_inf else None
    if limit is not None:
        limit = complex(limit.value)
    report = RegluingReport(status=status, kind="poly", convention=convention,
                            limit=limit, stages=rows, config=config, error=error,
                            cut_note=cut_note)
    report.final_state = state  # convenience for callers; not serialized
    report.states = states
    return report


def run_rat(r, alpha0: Optional[SampledCurve], tol: float = 1e-10,
            max_stages: int = 30, M: int = 20, N_check: int = 100,
            cut_cap: int = DEFAULT_CUT_CAP,
            convention: str = CONVENTION_COMPOSE,
            config_extra: Optional[dict] = None) -> RegluingReport:
    """Rational analogue of run_poly: converged when max(|da|, |db|) stays
    below tol for three consecutive stages."""
    rp = r if isinstance(r, RatParam) else RatParam(*r)
    config = {
        "kind": "rat",
        "a": [rp.a.real, rp.a.imag],
        "b": [rp.b.real, rp.b.imag],
        "alpha0": _alpha0_doc(alpha0),
        "tol": float(tol),
        "max_stages": int(max_stages),
        "orbit_len": int(M),
        "n_check": int(N_check),
        "cut_cap": int(cut_cap),
        "convention": convention,
    }
    if config_extra:
        config.update(config_extra)

    if max_stages < 1:
        return RegluingReport(status="budget-exhausted", kind="rat",
                              convention=convention, limit=None, stages=[],
                              config=config)

    state = init_rat(rp, alpha0, M=M, N_check=N_check, convention=convention)
    rows = [_stage_row_rat(state, None)]
    deltas: List[float] = []
    status = "budget-exhausted"
    error = None
    cut_note = None
    states = [state]
    while state.n < max_stages:
        prev = (state.a_n, state.b_n)
        try:
            state = step_rat(state, cut_cap=cut_cap)
        except (CriticalValueOnCurve, CutCollision, AmbiguousStep) as exc:
            if state.n >= 3 and state.cuts_tracked:
                cut_note = (f"cut tracking stopped before stage {state.n + 1}: "
                            f"{type(exc).__name__}: {exc}")
                state = _replace_state(state, cuts_tracked=False)
                continue
            status = "ambiguous"
            error = f"stage {state.n + 1}: {type(exc).__name__}: {exc}"
            break
        except ReglueError as exc:
            status = "ambiguous"
            error = f"stage {state.n + 1}: {type(exc).__name__}: {exc}"
            break
        states.append(state)
        if state.a_n.is_inf or state.b_n.is_inf:
            delta = math.inf
        else:
            delta = max(abs(state.a_n.value - prev[0].value),
                        abs(state.b_n.value - prev[1].value))
        rows.append(_stage_row_rat(state, delta))
        if (state.a_n.is_inf or state.b_n.is_inf
                or abs(state.a_n) > DIVERGENCE_RADIUS
                or abs(state.b_n) > DIVERGENCE_RADIUS):
            status = "diverged"
            break
        deltas.append(delta)
        if len(deltas) >= 3 and all(d < tol for d in deltas[-3:]):
            status = "converged"
            break

    if state.a_n.is_inf or state.b_n.is_inf:
        limit = None
    else:
        limit = (complex(state.a_n.value), complex(state.b_n.value))
    report = RegluingReport(status=status, kind="rat", convention=convention,
                            limit=limit, stages=rows, config=config, error=error,
                            cut_note=cut_note)
    report.final_state = state
    report.states = states
    return report


def _alpha0_doc(alpha0: Optional[SampledCurve]):
    if alpha0 is None:
        return "degenerate"
    e = alpha0.endpoint
    return {
        "endpoint": [e.value.real, e.value.imag],
        "samples": len(alpha0.points),
        "closed": alpha0.closed,
    }
