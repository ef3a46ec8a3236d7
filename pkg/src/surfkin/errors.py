"""Exception hierarchy shared by all surfkin modules."""


class SurfkinError(Exception):
    """Base class for every error raised by the package."""


class TensorError(SurfkinError, ValueError):
    pass


class ChartError(SurfkinError, ValueError):
    """Invalid chart construction or a chart used outside its contract."""


class ImmersionError(ChartError):
    """Tangent vectors r_u, r_v are (numerically) parallel."""


class NumericalError(SurfkinError, ArithmeticError):
    pass


class UmbilicError(SurfkinError):
    """A principal frame was requested at an umbilic point."""


class DegenerateDeformation(SurfkinError):
    """The deformation gradient is rank deficient on the tangent plane."""


class InternalConsistencyError(SurfkinError):
    """Two independent routes to the same quantity disagree."""


class PreconditionError(SurfkinError, ValueError):
    pass


class MinimalityError(PreconditionError):
    """A pure drilling isometry was requested on a non-minimal surface."""


class ProfileError(SurfkinError, ValueError):
    """Invalid profile curve (non-positive radius, bad range)."""


class BendingAngleSingularity(SurfkinError, ArithmeticError):
    """The bending angle is too close to zero for the pure-bending spin formula."""


class ConfigError(SurfkinError, ValueError):
    pass
