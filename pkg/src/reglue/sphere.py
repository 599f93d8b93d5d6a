"""Extended complex arithmetic on the Riemann sphere and sampled-curve geometry.

Points of the sphere are :class:`ExtComplex`: either a finite complex number
or the single point at infinity (no signed infinities, no NaN).  Curves are
polylines of sampled points (:class:`SampledCurve`); the sampling produced
upstream is treated as ground truth, so all geometric operations here are
exact over the samples.

Distances are measured in the chordal (spherical) metric

    d(p, q) = 2|p - q| / sqrt((1 + |p|^2)(1 + |q|^2)),

which extends continuously to infinity with d(p, inf) = 2 / sqrt(1 + |p|^2)
and is bounded by 2 (antipodal points).
"""

from __future__ import annotations

import math
import cmath
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ._backend import kernels
from .errors import SphereArithmeticError

COINCIDE_TOL = 1e-12  # point-coincidence / symmetry tolerance

Pointlike = Union["ExtComplex", complex, float, int]


def _canon(z: complex) -> "ExtComplex":
    """Canonicalize a raw complex: overflowed components become infinity."""
    if math.isnan(z.real) or math.isnan(z.imag):
        raise SphereArithmeticError("NaN produced by sphere arithmetic")
    if math.isinf(z.real) or math.isinf(z.imag):
        return INF
    return ExtComplex(z)


class ExtComplex:
    """A point of the Riemann sphere: finite complex value or infinity.

    Immutable.  Arithmetic follows the usual conventions compatible with
    rational maps: x + inf = inf, 1/0 = inf, 1/inf = 0, inf * x = inf for
    x != 0.  The indeterminate forms inf + inf, 0 * inf, inf / inf and 0/0
    raise :class:`SphereArithmeticError`.
    """

    __slots__ = ("_z",)

    def __init__(self, z: Pointlike = 0.0, _inf: bool = False):
        if _inf:
            object.__setattr__(self, "_z", None)
            return
        if isinstance(z, ExtComplex):
            object.__setattr__(self, "_z", z._z)
            return
        z = complex(z)
        if math.isnan(z.real) or math.isnan(z.imag):
            raise ValueError("finite sphere points cannot hold NaN")
        if math.isinf(z.real) or math.isinf(z.imag):
            object.__setattr__(self, "_z", None)
            return
        object.__setattr__(self, "_z", z)

    def __setattr__(self, name, value):
        raise AttributeError("ExtComplex is immutable")

    @property
    def is_inf(self) -> bool:
        return self._z is None

    @property
    def value(self) -> complex:
        """Finite complex value; raises on infinity."""
        if self._z is None:
            raise SphereArithmeticError("point at infinity has no finite value")
        return self._z

    def __complex__(self) -> complex:
        return self.value

    def __abs__(self) -> float:
        return math.inf if self._z is None else abs(self._z)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtComplex):
            return self._z == other._z
        if isinstance(other, (complex, float, int)):
            return self._z is not None and self._z == complex(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._z)

    def __repr__(self):
        return "ExtComplex(inf)" if self._z is None else f"ExtComplex({self._z!r})"

    def __neg__(self) -> "ExtComplex":
        return INF if self._z is None else ExtComplex(-self._z)

    def __add__(self, other: Pointlike) -> "ExtComplex":
        other = ext(other)
        if self._z is None and other._z is None:
            raise SphereArithmeticError("inf + inf is undefined")
        if self._z is None or other._z is None:
            return INF
        return _canon(self._z + other._z)

    __radd__ = __add__

    def __sub__(self, other: Pointlike) -> "ExtComplex":
        return self + (-ext(other))

    def __rsub__(self, other: Pointlike) -> "ExtComplex":
        return ext(other) + (-self)

    def __mul__(self, other: Pointlike) -> "ExtComplex":
        other = ext(other)
        if self._z is None or other._z is None:
            a, b = (self, other) if self._z is not None else (other, self)
            # b is inf here
            if a._z == 0:
                raise SphereArithmeticError("0 * inf is undefined")
            return INF
        return _canon(self._z * other._z)

    __rmul__ = __mul__

    def reciprocal(self) -> "ExtComplex":
        if self._z is None:
            return ExtComplex(0.0)
        if self._z == 0:
            return INF
        return _canon(1.0 / self._z)

    def __truediv__(self, other: Pointlike) -> "ExtComplex":
        other = ext(other)
        if self._z is None and other._z is None:
            raise SphereArithmeticError("inf / inf is undefined")
        if self._z is not None and other._z is not None and self._z == 0 and other._z == 0:
            raise SphereArithmeticError("0 / 0 is undefined")
        return self * other.reciprocal()

    def __rtruediv__(self, other: Pointlike) -> "ExtComplex":
        return ext(other) / self


INF = ExtComplex(_inf=True)


def ext(z: Pointlike) -> ExtComplex:
    """Coerce to ExtComplex."""
    return z if isinstance(z, ExtComplex) else ExtComplex(z)


def chordal_distance(p: Pointlike, q: Pointlike) -> float:
    """Chordal metric on the sphere; symmetric, bounded by 2.

    Stable for large finite values: coordinates beyond 1e120 are inverted
    first (inversion z -> 1/z is a chordal isometry).
    """
    p = ext(p)
    q = ext(q)
    if p.is_inf and q.is_inf:
        return 0.0
    if p.is_inf:
        return 2.0 / math.hypot(1.0, abs(q.value))
    if q.is_inf:
        return 2.0 / math.hypot(1.0, abs(p.value))
    zp, zq = p.value, q.value
    if abs(zp) > 1e120 or abs(zq) > 1e120:
        zp = 0.0 if abs(zp) > 1e300 else 1.0 / zp
        zq = 0.0 if abs(zq) > 1e300 else 1.0 / zq
    return 2.0 * abs(zp - zq) / (math.hypot(1.0, abs(zp)) * math.hypot(1.0, abs(zq)))


class SampledCurve:
    """Ordered polyline approximation of a simple curve.

    points     -- tuple of ExtComplex samples (at least 2, consecutive samples
                  distinct; all finite for open curves).
    closed     -- whether the last sample connects back to the first.
    symmetric  -- whether the curve satisfies the odd symmetry
                  point(-t) = -point(t): the reversed, negated sample list
                  equals the original within 1e-12.

    Immutable after construction; treat instances as values.
    """

    __slots__ = ("points", "closed", "symmetric", "_arr")

    def __init__(self, points: Iterable[Pointlike], closed: bool = False,
                 symmetric: bool = False):
        pts = tuple(ext(p) for p in points)
        if len(pts) < 2:
            raise ValueError("a sampled curve needs at least 2 points")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("consecutive curve samples must be distinct")
        if not closed and any(p.is_inf for p in pts):
            raise ValueError("open curves must consist of finite points")
        if symmetric:
            rev = [(-p) for p in reversed(pts)]
            for a, b in zip(pts, rev):
                if a.is_inf != b.is_inf:
                    raise ValueError("curve marked symmetric is not")
                if not a.is_inf and abs(a.value - b.value) > COINCIDE_TOL:
                    raise ValueError(
                        "curve marked symmetric is not (max deviation above 1e-12)"
                    )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "closed", bool(closed))
        object.__setattr__(self, "symmetric", bool(symmetric))
        object.__setattr__(self, "_arr", None)

    def __setattr__(self, name, value):
        raise AttributeError("SampledCurve is immutable")

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return (f"SampledCurve(n={len(self.points)}, closed={self.closed}, "
                f"symmetric={self.symmetric})")

    @property
    def array(self) -> np.ndarray:
        """Finite samples as a complex128 array (raises if any point is inf)."""
        if self._arr is None:
            if any(p.is_inf for p in self.points):
                raise SphereArithmeticError("curve contains the point at infinity")
            arr = np.array([p.value for p in self.points], dtype=np.complex128)
            arr.setflags(write=False)
            object.__setattr__(self, "_arr", arr)
        return self._arr

    @property
    def endpoint(self) -> ExtComplex:
        """The t=+1 endpoint (last sample)."""
        return self.points[-1]


def segment_curve(a: Pointlike, b: Pointlike, n: int = 129, closed: bool = False,
                  symmetric: Optional[bool] = None) -> SampledCurve:
    """Straight segment from a to b sampled at n points."""
    a = complex(ext(a).value)
    b = complex(ext(b).value)
    t = np.linspace(0.0, 1.0, n)
    pts = (1.0 - t) * a + t * b
    if symmetric is None:
        symmetric = abs(a + b) <= COINCIDE_TOL
    return SampledCurve([complex(p) for p in pts], closed=closed, symmetric=symmetric)


class CurveFamily:
    """A finite family of sampled curves, optionally labeled by stage.

    Pairwise disjointness is not an invariant; it is checked on demand by
    the pullback machinery.
    """

    __slots__ = ("curves", "labels")

    def __init__(self, curves: Iterable[SampledCurve] = (),
                 labels: Optional[Sequence[int]] = None):
        curves = tuple(curves)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(curves):
                raise ValueError("labels and curves must have equal length")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("CurveFamily is immutable")

    def __len__(self):
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)

    def __repr__(self):
        return f"CurveFamily(n={len(self.curves)})"


def curve_diameter(curve: SampledCurve) -> float:
    """Max chordal distance over all pairs of samples (exact over samples)."""
    finite = [p.value for p in curve.points if not p.is_inf]
    has_inf = len(finite) < len(curve.points)
    best = 0.0
    if len(finite) >= 2:
        best = kernels.max_pair_chordal(np.asarray(finite, dtype=np.complex128))
    if has_inf and finite:
        best = max(best, max(2.0 / math.hypot(1.0, abs(z)) for z in finite))
    return best


def count_exceeding(family: CurveFamily, eps: float) -> int:
    """Number of curves in the family with chordal diameter > eps.

    A family of pullbacks being "contracted" shows up as this count staying
    finite (and small) as eps shrinks down the stage tower.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    return sum(1 for c in family if curve_diameter(c) > eps)


def segment_crosses_curve(a: Pointlike, b: Pointlike, curve: SampledCurve,
                          tol: float = 1e-12) -> bool:
    """Whether the straight segment [a, b] meets the polyline of `curve`.

    Inclusive of endpoint touches within `tol` (Euclidean).
    """
    a = ext(a).value
    b = ext(b).value
    arr = curve.array
    d = kernels.segment_polyline_dist(a.real, a.imag, b.real, b.imag,
                                      np.ascontiguousarray(arr.real),
                                      np.ascontiguousarray(arr.imag),
                                      curve.closed)
    return d <= tol


def point_curve_distance(p: Pointlike, curve: SampledCurve) -> float:
    """Min Euclidean distance from a finite point to the curve polyline."""
    p = ext(p).value
    arr = curve.array
    return kernels.point_polyline_dist(p.real, p.imag,
                                       np.ascontiguousarray(arr.real),
                                       np.ascontiguousarray(arr.imag),
                                       curve.closed)


def point_family_distance(p: Pointlike, family: CurveFamily) -> float:
    """Min Euclidean distance from a point to any curve of the family."""
    if len(family) == 0:
        return math.inf
    return min(point_curve_distance(p, c) for c in family)


def segment_crosses_family(a: Pointlike, b: Pointlike, family: CurveFamily,
                           tol: float = 1e-12) -> list:
    """Indices of family curves met by segment [a, b]."""
    a = ext(a).value
    b = ext(b).value
    hits = []
    # cheap bbox rejection before exact segment tests
    lox, hix = min(a.real, b.real) - tol, max(a.real, b.real) + tol
    loy, hiy = min(a.imag, b.imag) - tol, max(a.imag, b.imag) + tol
    for i, c in enumerate(family):
        arr = c.array
        if arr.real.min() > hix or arr.real.max() < lox:
            continue
        if arr.imag.min() > hiy or arr.imag.max() < loy:
            continue
        d = kernels.segment_polyline_dist(a.real, a.imag, b.real, b.imag,
                                          np.ascontiguousarray(arr.real),
                                          np.ascontiguousarray(arr.imag),
                                          c.closed)
        if d <= tol:
            hits.append(i)
    return hits


# ---------------------------------------------------------------------------
# line-oriented text serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.17g" % x


def curve_to_text(curve: SampledCurve) -> str:
    """Serialize: header `curve closed=<0|1> symmetric=<0|1> n=<k>`, then one
    `<re> <im>` line per sample (17 significant digits); `inf` encodes the
    point at infinity."""
    lines = [
        "curve closed=%d symmetric=%d n=%d"
        % (int(curve.closed), int(curve.symmetric), len(curve.points))
    ]
    for p in curve.points:
        if p.is_inf:
            lines.append("inf")
        else:
            lines.append(_fmt(p.value.real) + " " + _fmt(p.value.imag))
    return "\n".join(lines) + "\n"


def curve_from_text(text: str) -> SampledCurve:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("curve "):
        raise ValueError("not a curve document (missing 'curve' header)")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    n = int(fields["n"])
    closed = bool(int(fields.get("closed", "0")))
    symmetric = bool(int(fields.get("symmetric", "0")))
    if len(lines) - 1 != n:
        raise ValueError(f"curve header promises {n} points, found {len(lines) - 1}")
    pts: list = []
    for ln in lines[1:]:
        if ln == "inf":
            pts.append(INF)
        else:
            re_s, im_s = ln.split()
            pts.append(complex(float(re_s), float(im_s)))
    return SampledCurve(pts, closed=closed, symmetric=symmetric)


def write_curve(curve: SampledCurve, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(curve_to_text(curve))


def read_curve(path) -> SampledCurve:
    with open(path, "r", encoding="ascii") as fh:
        return curve_from_text(fh.read())
