"""Exception hierarchy shared by all plurilag modules."""


class PluriLagError(Exception):
    """Base class for every error raised by this package."""


class InvalidCellError(PluriLagError, ValueError):
    """A square, cube or corner was built from inconsistent combinatorial data."""


class SurfaceError(PluriLagError, ValueError):
    """A quad-surface failed validation (topology, orientation, duplicates)."""

    def __init__(self, message, square_index=None):
        super().__init__(message if square_index is None else f"square {square_index}: {message}")
        self.square_index = square_index


class NotInteriorError(PluriLagError, ValueError):
    """The requested vertex is not an interior vertex of the surface."""


class NotFlippableError(PluriLagError, ValueError):
    """A cube does not meet the surface in a flippable 3D-corner."""


class MissingFieldError(PluriLagError, KeyError):
    """A field value needed by an evaluation is absent."""

    def __init__(self, vertex):
        if isinstance(vertex, str):
            super().__init__(f"no field value for cube label {vertex!r}")
        else:
            vertex = tuple(vertex)
            super().__init__(f"no field value at vertex {vertex}")
        self.vertex = vertex

    def __str__(self):
        return self.args[0]


class DomainError(PluriLagError, ValueError):
    """A leg function or residual was evaluated outside its real domain."""


class SingularDataError(PluriLagError, ZeroDivisionError):
    """The unknown of an affine equation has a vanishing coefficient."""


class NoBracketError(PluriLagError, RuntimeError):
    """No sign change could be found for a scalar root problem."""


class ConvergenceError(PluriLagError, RuntimeError):
    """A root iteration stopped without meeting its tolerance."""


class NoAdmissibleRootError(PluriLagError, RuntimeError):
    """A corner equation has no root inside the admissible domain."""


class InconsistentSystemError(PluriLagError, RuntimeError):
    """A completed cube violates corner equations that were not used to build it."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class UnknownModelError(PluriLagError, KeyError):
    def __str__(self):
        return self.args[0]
