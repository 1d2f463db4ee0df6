"""Numerical experiments on forced pendulums, strip systems and points sliding on
rotating convex curves: integration with window exits, averaging in the fast
frequency, topological shooting for surviving solutions, and periodic orbits."""

__version__ = "0.1.0"

from types import ModuleType as _ModuleType

from .errors import (DegenerateFit, EndpointsSameSide, IncommensuratePeriods, NoBracketProgress,
                     NoConvergence, NonFinite, NumericalError, OscillabError, OutOfSpan,
                     QuadratureFailure, RootNotBracketed, SingularJacobian, StepUnderflow)
from .ode import (ExitReport, Outcome, State, Trajectory, VectorField, Window, integrate,
                  integrate_with_exit, sample)
from .forcing import CatalogFunction, Forcing, OscillatoryForcing
from .curves import (Circle, ConvexCurve, ParametricCurve, RotationLaw, curve_constants,
                     make_circle, make_ellipse, rotation_condition, vertical_tangent_points)
from .mollifier import Mollifier, mollifier_eval
from .models import (ForcedSystem, StripSystem, lagrangian_residual, pendulum_field,
                     pendulum_system, rotating_curve_field, rotating_curve_system, strip_field,
                     strip_system)
from .averaging import (AveragedSystem, AveragingReport, averaged_field, convergence_study,
                        deviation, mean_value)
from .wazewski import (Segment, SurvivalCertificate, bisect_survivor, classify_exit,
                       verify_transversality)
from .periodic import (PeriodicOrbit, UpperLowerPair, common_period, find_periodic,
                       forced_period, time_T_map, verify_upper_lower)

__all__ = [name for name, obj in list(globals().items())
           if not name.startswith("_") and not isinstance(obj, _ModuleType)]
