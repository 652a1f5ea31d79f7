"""Exception taxonomy used across the package.

The CLI maps these onto stable exit codes: usage errors exit 1, data and
precondition errors exit 2, numerical failures exit 3.
"""


class TvDeblurError(Exception):
    """Base class for all package errors."""


class ShapeError(TvDeblurError, ValueError):
    """Array dimensions are inconsistent with the operation."""


class DataError(TvDeblurError, ValueError):
    """Array contents violate an invariant (non-finite values, bad ranges)."""


class SymmetryError(TvDeblurError, ValueError):
    """A fast-transform path requires a quadrantally symmetric kernel."""


class UnsupportedError(TvDeblurError, ValueError):
    """Requested configuration lies outside what the operation supports."""


class PreconditionError(TvDeblurError, ValueError):
    """A stated precondition (padding, sizes) is not met."""


class SingularPlanError(TvDeblurError, ValueError):
    """The system operator is singular and no solve plan can be built."""


class ConvergenceError(TvDeblurError, RuntimeError):
    """An iterative solve failed to reach its tolerance."""
