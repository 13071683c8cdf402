"""Numerical comparison of the Sasaki metric and the exponential-pullback
metric on normal tubes of embedded submanifolds."""

from .ambient import AmbientSpace, GeodesicRecord, cos_k, sin_k
from .catalog import CATALOG, CatalogEntry, build_builtin
from .exceptions import (
    ChartExitError,
    DegenerateFrameError,
    DegenerateRadiusError,
    DomainError,
    InsufficientDataError,
    IntegrationError,
    NumericalError,
    PreconditionError,
)
from .expressions import ExprSyntaxError, evaluate, parse_expr
from .formulas import (
    ExpansionReport,
    TangencyResult,
    convergence_order,
    euclidean_exact,
    expansion_report,
    first_order_tangency,
    quadratic_expansion,
    space_form_exact,
    space_form_jacobi_closed,
)
from .pullback import (
    PullbackContext,
    build_context,
    exp_tube,
    jacobi_field,
    pullback_metric,
    pullback_metric_fd,
)
from .submanifold import (
    FrameAtPoint,
    Immersion,
    frame_at,
    normal_connection_coeffs,
    second_fundamental_form,
    shape_operator,
)
from .tube import (
    TubePoint,
    TubeTangent,
    decompose,
    horizontal_lift,
    radial_vertical,
    sasaki,
    vertical_lift,
)

__version__ = "0.1.0"
