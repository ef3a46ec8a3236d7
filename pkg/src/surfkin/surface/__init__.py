"""Charts, frames, connectors and surface differential operators."""

from .calculus import (
    ChartSample,
    curvature_tensor,
    sample,
    surface_curl,
    surface_divergence,
    surface_gradient,
    surface_gradient_scalar,
    surface_gradient_vector,
    surface_laplacian,
)
from .charts import (
    Chart,
    Helicoid,
    Jet,
    Monge,
    Plane,
    PolarPlane,
    Revolution,
    Sphere,
    Torus,
    catenoid,
    cylinder,
    sphere_of_revolution,
)
from .frames import (
    ConnectorSet,
    Coordinate,
    FrameSpec,
    Principal,
    Rotated,
    connectors,
    rotate_frame,
    transform_connectors,
    uv_angle,
)
from .identities import (
    alternative_gaussian_curvature,
    codazzi_residuals,
    full_frame_compatibility,
    gauss_residual,
    metric_gaussian_curvature,
    principal_codazzi_residuals,
)
