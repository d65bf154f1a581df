"""Exceptions raised by the fixed-point toolkit.

Mathematical failures (a map that is not a contraction, a solve that did
not converge) are reported as verdicts on certificates and traces. The
exceptions below are for inputs that cannot be evaluated at all.
"""


class FixedPointError(ValueError):
    """Base class for every error raised by this package."""


class InputError(FixedPointError):
    """Malformed input: wrong shape, empty set, index out of range, bad params."""


class PreconditionError(InputError):
    """An operation in strict mode was handed an uncertified input."""


class ReductionError(FixedPointError):
    """A gauge reduction would produce an invalid gauge."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class PotentialUndefinedError(FixedPointError):
    """theta(d) >= d, so the Caristi potential has no finite value at d."""

    def __init__(self, d: float, theta_d: float):
        super().__init__(
            f"Caristi potential undefined at d={d!r}: theta(d)={theta_d!r} is not below d"
        )
        self.d = d
        self.theta_d = theta_d


class NumericError(FixedPointError):
    """A Bellman aggregator produced a non-finite value."""

    def __init__(self, message: str, x: int, y: int):
        super().__init__(message)
        self.x = x
        self.y = y


class CertificationViolationError(FixedPointError):
    """An orbit step broke the selection bound the certificate promised."""

    def __init__(self, message: str, step: int, edge: tuple[int, int], selected: int):
        super().__init__(message)
        self.step = step
        self.edge = edge
        self.selected = selected
