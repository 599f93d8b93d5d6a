"""The two normalized quadratic families and their curve pullback.

p_c(z)  = z^2 + c                  (critical points 0, inf; critical value c)
R_{a,b} = (a z^2 - b)/(z^2 - 1)    (critical points inf, 0; R(inf)=a, R(0)=b)

Both maps are even, so the preimage of a point is a +-pair and the preimage
of a simple curve avoiding the critical values is a pair of disjoint simple
curves swapped by z -> -z.  Pulling a sampled curve back means continuing one
square-root branch along the samples (nearest-sign rule) and negating for
the sibling component.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ._backend import kernels
from .errors import AmbiguousStep, CriticalValueOnCurve
from .sphere import (INF, CurveFamily, ExtComplex, Pointlike, SampledCurve,
                     chordal_distance, ext, point_curve_distance)

# pullback tuning
STEP_BOUND = 0.05      # max chordal gap between consecutive preimage samples
MAX_HALVINGS = 12      # local midpoint-refinement budget
DISJOINT_TOL = 1e-9    # min chordal gap between the two output components
CRIT_CLEARANCE = 1e-9  # required clearance of critical values from the curve


@dataclass(frozen=True)
class PolyParam:
    """Parameter c of p_c(z) = z^2 + c."""

    c: complex

    def __post_init__(self):
        c = complex(ext(self.c).value)  # raises on inf
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class RatParam:
    """Parameters (a, b) of R_{a,b}(z) = (a z^2 - b)/(z^2 - 1).

    a and b are the two critical values and must be distinct finite points
    (the degenerate forms with a critical value at infinity belong to the
    polynomial family).
    """

    a: complex
    b: complex

    def __post_init__(self):
        a = complex(ext(self.a).value)
        b = complex(ext(self.b).value)
        if a == b:
            raise ValueError("critical values a and b must be distinct")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


MapParam = Union[PolyParam, RatParam]


def eval_poly(p: PolyParam, z: Pointlike) -> ExtComplex:
    """p_c(z) = z^2 + c, with inf -> inf."""
    z = ext(z)
    if z.is_inf:
        return INF
    return (z * z) + p.c


def eval_rat(r: RatParam, z: Pointlike) -> ExtComplex:
    """R_{a,b}(z) with the sphere cases: inf -> a, +-1 -> inf."""
    z = ext(z)
    if z.is_inf:
        return ExtComplex(r.a)
    w = z.value
    w2 = w * w
    if w2 == 1.0:
        return INF
    num = r.a * w2 - r.b
    den = w2 - 1.0
    if den == 0:
        return INF
    return ExtComplex(num) / ExtComplex(den)


def eval_map(m: MapParam, z: Pointlike) -> ExtComplex:
    return eval_poly(m, z) if isinstance(m, PolyParam) else eval_rat(m, z)


def preimages_poly(p: PolyParam, w: Pointlike) -> Tuple[ExtComplex, ExtComplex]:
    """The +-sqrt(w - c) pair, coincident at the critical points."""
    w = ext(w)
    if w.is_inf:
        return (INF, INF)
    r = cmath.sqrt(w.value - p.c)
    return (ExtComplex(r), ExtComplex(-r))


def preimages_rat(r: RatParam, w: Pointlike) -> Tuple[ExtComplex, ExtComplex]:
    """The +-sqrt((w - b)/(w - a)) pair; w=inf -> {1,-1}, w=a -> {inf,inf},
    w=b -> {0,0}."""
    w = ext(w)
    if w.is_inf:
        return (ExtComplex(1.0), ExtComplex(-1.0))
    z = w.value
    if z == r.a:
        return (INF, INF)
    if z == r.b:
        return (ExtComplex(0.0), ExtComplex(0.0))
    val = cmath.sqrt((z - r.b) / (z - r.a))
    return (ExtComplex(val), ExtComplex(-val))


def _branch_targets(m: MapParam, samples: np.ndarray) -> np.ndarray:
    """g-values whose square roots are the preimages of the samples."""
    if isinstance(m, PolyParam):
        return samples - m.c
    return (samples - m.b) / (samples - m.a)


def _critical_values(m: MapParam):
    if isinstance(m, PolyParam):
        return (m.c,)
    return (m.a, m.b)


def pullback_curve(m: MapParam, curve: SampledCurve) -> Tuple[SampledCurve, SampledCurve]:
    """Pull a sampled curve back to its two preimage components.

    One square-root branch is continued along the curve samples (principal
    root at the first sample as the seed, nearest-sign afterwards); the
    sibling component is its negation.  The input sampling is midpoint-refined
    where the preimage moves more than 0.05 chordal per step or where the
    branch choice is ambiguous, up to 12 rounds.

    Raises CriticalValueOnCurve when a critical value of the map lies on the
    curve (within 1e-9) or when the two components fail to stay disjoint,
    and AmbiguousStep if refinement cannot stabilize the branch choice.
    """
    for cv in _critical_values(m):
        if point_curve_distance(cv, curve) < CRIT_CLEARANCE:
            raise CriticalValueOnCurve(
                "critical value %s lies on the curve; preimage components merge"
                % format(cv, ".6g")
            )

    samples = curve.array.copy()
    vals = None
    for _ in range(MAX_HALVINGS + 1):
        g = _branch_targets(m, samples)
        if np.any(np.abs(g) < 1e-30) or not np.all(np.isfinite(g)):
            raise CriticalValueOnCurve("curve passes through a critical value")
        seed = np.sqrt(g[0])
        vals, ambig_idx, zero_idx = kernels.sqrt_continue_scan(g, seed, 1.05, 1e-10)
        if zero_idx >= 0:
            raise CriticalValueOnCurve(
                "curve passes within 1e-10 of a critical value (sample %d)" % zero_idx
            )
        # chordal gaps between consecutive preimage samples
        w = np.hypot(1.0, np.abs(vals))
        gaps = 2.0 * np.abs(np.diff(vals)) / (w[1:] * w[:-1])
        bad = gaps > STEP_BOUND
        if ambig_idx >= 0:
            bad[ambig_idx - 1] = True
        if not bad.any():
            break
        # midpoint-refine the flagged input intervals
        ins = np.where(bad)[0]
        mids = 0.5 * (samples[ins] + samples[ins + 1])
        samples = np.insert(samples, ins + 1, mids)
    else:
        if ambig_idx >= 0:
            raise AmbiguousStep(ambig_idx, "branch choice still ambiguous after refinement")

    comp_a = _decimate(vals)
    comp_b = -comp_a

    gap = kernels.min_cross_chordal(comp_a, comp_b)
    if gap <= DISJOINT_TOL:
        raise CriticalValueOnCurve(
            "preimage components are not disjoint (min gap %.3e)" % gap
        )
    if curve.closed:
        # a closed loop around a critical value has connected preimage
        d_end = chordal_distance(complex(vals[0]), complex(vals[-1]))
        if d_end > STEP_BOUND * 2:
            raise CriticalValueOnCurve(
                "closed curve encircles a critical value; preimage is connected"
            )

    ca = SampledCurve([complex(z) for z in comp_a], closed=curve.closed, symmetric=False)
    cb = SampledCurve([complex(z) for z in comp_b], closed=curve.closed, symmetric=False)
    return (ca, cb)


def _decimate(vals: np.ndarray, min_gap: float = 0.0125, min_keep: int = 9) -> np.ndarray:
    """Thin oversampled preimage polylines, keeping endpoints.

    Chordal spacing below `min_gap` is redundant for downstream geometry;
    tiny curves keep at least `min_keep` evenly-spread samples.
    """
    n = vals.shape[0]
    if n <= min_keep:
        return vals
    w = np.hypot(1.0, np.abs(vals))
    keep = [0]
    last = 0
    for i in range(1, n - 1):
        d = 2.0 * abs(vals[i] - vals[last]) / (w[i] * w[last])
        if d >= min_gap:
            keep.append(i)
            last = i
    keep.append(n - 1)
    if len(keep) < min_keep:
        idx = np.unique(np.linspace(0, n - 1, min_keep).round().astype(int))
        return vals[idx]
    return vals[np.array(keep)]


def pullback_family(m: MapParam, family: CurveFamily) -> CurveFamily:
    """Pull back every curve of a family; labels are inherited per parent."""
    out = []
    labels = []
    for i, c in enumerate(family):
        a, b = pullback_curve(m, c)
        out.extend((a, b))
        lab = family.labels[i] if family.labels is not None else i
        labels.extend((lab, lab))
    return CurveFamily(out, labels=labels)
