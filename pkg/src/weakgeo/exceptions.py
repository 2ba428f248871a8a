"""Exception hierarchy.

Everything raised on purpose by the library derives from
:class:`WeakGeoError`.  Errors that signal a physically ill-posed request
(orthogonal post-selection, pointer running off the grid, ...) derive from
:class:`PhysicsGuardError` so the scenario runner can map them to a single
exit code.
"""


class WeakGeoError(Exception):
    """Base class for all library errors."""


class DimensionError(WeakGeoError, ValueError):
    """Operands have incompatible dimensions."""


class NotNormalizedError(WeakGeoError, ValueError):
    """A state that must be normalized is not."""


class PhysicsGuardError(WeakGeoError):
    """The requested quantity is singular or unrepresentable."""


class ChartError(PhysicsGuardError):
    """Point lies outside the psi^0 != 0 coordinate chart."""


class UndefinedPhaseError(PhysicsGuardError):
    """A vanishing overlap makes a Pancharatnam phase undefined."""


class AntipodalError(PhysicsGuardError):
    """Two Bloch points are antipodal; the connecting geodesic is not unique."""


class AmplificationDivergenceError(PhysicsGuardError):
    """Pre- and post-selected states are (nearly) orthogonal."""


class PostSelectionError(PhysicsGuardError):
    """Post-selection probability is numerically zero."""


class GridOverflowError(PhysicsGuardError):
    """Pointer amplitude reaches the edges of the position grid."""


class WeakRegimeError(PhysicsGuardError):
    """Coupling is outside the configured weak regime."""
