"""Exception types raised across the pipeline.

All of them derive from ``ValueError`` (or ``KeyError`` for lookups) so callers
that only care about "bad input" can catch the builtin.
"""


class WopnError(Exception):
    """Base class for package errors."""


class SignalLengthError(WopnError, ValueError):
    pass


class DivergenceError(WopnError, ArithmeticError):
    """Integration produced a non-finite state."""

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"state became non-finite at t={self.time:.6g} s")


class DegenerateError(WopnError, ValueError):
    """Input has no usable structure (constant signal, single-vertex network, zero matrix...)."""


class InvalidInputError(WopnError, ValueError):
    pass


class ConnectivityError(WopnError, ValueError):
    def __init__(self, components):
        self.components = [list(c) for c in components]
        sizes = ", ".join(str(len(c)) for c in self.components)
        super().__init__(
            f"network is disconnected ({len(self.components)} components, sizes {sizes}): "
            f"{self.components}"
        )


class InvalidWeightError(WopnError, ValueError):
    pass


class ParameterError(WopnError, ValueError):
    pass


class InvalidMatrixError(WopnError, ValueError):
    pass


class SizeError(WopnError, ValueError):
    pass


class LabelError(WopnError, ValueError):
    pass


class ConfigError(WopnError, ValueError):
    pass


class NotFoundError(WopnError, KeyError):
    def __init__(self, name, available=()):
        self.name = name
        self.available = sorted(available)
        super().__init__(f"unknown system {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]
