"""Exception taxonomy for the regluing toolkit.

Every failure mode that corresponds to a violated mathematical hypothesis
gets its own class, so callers (and the CLI) can name the condition that
broke instead of guessing from a generic message.
"""


class ReglueError(Exception):
    """Base class for all library errors."""


class SphereArithmeticError(ReglueError):
    """Undefined operation on the Riemann sphere (inf+inf, 0*inf, inf/inf, 0/0)."""


class CriticalValueOnCurve(ReglueError):
    """A critical value of the map lies on (or too close to) the curve being
    pulled back, so the two preimage components merge."""


class ZeroCrossing(ReglueError):
    """A square-root continuation passed too close to the branch point 0."""


class AmbiguousStep(ReglueError):
    """Sample spacing too coarse to pick a square-root branch: the two
    candidate roots are nearly equidistant from the previous value."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"ambiguous branch choice at sample {index}")


class Unroutable(ReglueError):
    """No continuation path avoiding the cut curves was found within budget."""


class OnCutCurve(ReglueError):
    """Evaluation point lies on (or within tolerance of) a cut curve."""

    def __init__(self, stage, message=None):
        self.stage = stage
        super().__init__(message or f"point is on a cut curve of stage {stage}")


class Inadmissible(ReglueError):
    """The forward orbit of the path endpoint meets the path, violating the
    hypothesis that makes the regluing tower well defined."""

    def __init__(self, iterate, distance, message=None):
        self.iterate = iterate
        self.distance = distance
        super().__init__(
            message
            or "forward orbit of alpha0(1) meets the curve at n=%d (distance %.3e)"
            % (iterate, distance)
        )


class OrbitExhausted(ReglueError):
    """The truncated critical orbit is too short to take another step."""


class CutCollision(ReglueError):
    """Pulled-back cut curves are no longer pairwise disjoint."""


class DegenerateNormalizer(ReglueError):
    """alpha0(1)^2 is too close to 1: the rational branch normalizer 1-alpha0(1)^2
    vanishes and the square-root branch cannot be normalized at z=1."""


class RaysDontMeetCritical(ReglueError):
    """The traced external rays do not terminate at the critical point, so no
    symmetric path through 0 can be assembled from them."""


class AsymmetryTooLarge(ReglueError):
    """The two traced rays are not odd-symmetric mirror images within
    tolerance; no symmetric path can be averaged out of them."""


class OrbitDegeneracy(ReglueError):
    """An orbit value collided with a critical value (or the points 1, -1) of
    the current rational stage; the branch recursion degenerates."""
