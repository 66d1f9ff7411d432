"""Exception types shared across the package."""


class DtvTomoError(Exception):
    """Base class for all package errors."""


class DimensionError(DtvTomoError, ValueError):
    """Array shapes do not match the declared geometry."""


class ParamError(DtvTomoError, ValueError):
    """A parameter is outside its admissible range."""


class EmptyDataError(DtvTomoError, ValueError):
    """An operation received no angles / no data to work with."""


class FormatError(DtvTomoError, ValueError):
    """A file does not follow the expected binary layout."""


class DivergenceError(DtvTomoError, ArithmeticError):
    """An iterative solver produced a non-finite objective."""

    def __init__(self, iteration, value):
        super().__init__(f"non-finite objective {value!r} at iteration {iteration}")
        self.iteration = iteration
        self.value = value
