"""Holomorphic regluing of quadratic polynomials and rational maps.

The library cuts the sphere along a symmetric path (and all its pullbacks)
and straightens the resulting partially-defined map stage by stage through
a generalized Thurston iteration, exposing the pieces as reusable
components: sphere/curve geometry, the quadratic families and their curve
pullback, branch-tracked square-root towers, the iteration driver with
convergence diagnostics, external-ray path construction, and deterministic
rendering.
"""

from ._backend import BACKEND
from .branch import (PathRoute, Tower, TowerStage, continue_sqrt, eval_phi,
                     eval_tower_f, eval_tower_j, estimate_phi_convergence,
                     route_path)
from .errors import (AmbiguousStep, AsymmetryTooLarge, CriticalValueOnCurve,
                     CutCollision, DegenerateNormalizer, Inadmissible,
                     OnCutCurve, OrbitDegeneracy, OrbitExhausted, ReglueError,
                     RaysDontMeetCritical, SphereArithmeticError, Unroutable,
                     ZeroCrossing)
from .families import (PolyParam, RatParam, eval_poly, eval_rat,
                       preimages_poly, preimages_rat, pullback_curve,
                       pullback_family)
from .rays import (RayTrace, build_alpha0, check_admissible, green_value,
                   trace_ray)
from .render import (Image, Viewport, overlay_curves, render_julia,
                     render_phi_image, sample_julia_points, write_ppm)
from .sphere import (INF, CurveFamily, ExtComplex, SampledCurve,
                     chordal_distance, count_exceeding, curve_diameter,
                     curve_from_text, curve_to_text, ext, read_curve,
                     segment_crosses_curve, segment_curve, write_curve)
from .thurston import (PolyState, RatState, RegluingReport,
                       closed_form_example, init_poly, init_rat, run_poly,
                       run_rat, step_poly, step_rat)

__version__ = "0.1.0"
