"""Exception hierarchy for the package.

Everything raised on purpose derives from PpwaveError so callers (the CLI
in particular) can distinguish "your input is bad" (ConfigError and the
model validation family, exit code 2), "a mathematical check failed"
(CheckFailure, exit code 3), and genuine bugs (anything else, exit code 4).
"""

from __future__ import annotations


class PpwaveError(Exception):
    """Base class for all package errors."""


class ConfigError(PpwaveError):
    """Invalid configuration input.

    `pointer` is a JSON-pointer path ("/A/0/1", "/fourier/modes/2", ...)
    locating the offending value in the config document.
    """

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}" if pointer else message)


class ModelValidationError(PpwaveError):
    """A model ingredient violates its contract."""


class NonSymmetric(ModelValidationError):
    pass


class NonTraceless(ModelValidationError):
    pass


class ZeroOperator(ModelValidationError):
    pass


class ConstantF(ModelValidationError):
    pass


class DimensionTooSmall(ModelValidationError):
    pass


class InvalidSelector(PpwaveError):
    """Unknown derivative selector or missing index argument."""


class BasePointMismatch(PpwaveError):
    """Two tangent vectors do not share a base point."""


class ModelMismatch(PpwaveError):
    """Objects built against different models were combined."""


class StepFailure(PpwaveError):
    """The adaptive integrator could not continue (step size underflow)."""


class BlowUpDetected(PpwaveError):
    """A Riccati path left the representable range in finite time."""

    def __init__(self, t_star: float, side: str):
        self.t_star = t_star
        self.side = side
        super().__init__(f"Riccati blow-up at t = {t_star!r} ({side} of 0)")


class BlowUp(PpwaveError):
    """A geodesic trial failed to reach the horizon."""


class NotAGenerator(PpwaveError):
    """Element is not of one of the two generator forms (0, r, w) / (k, 0, 0)."""


class NotInSigmaForm(PpwaveError):
    """Closed-form transport needs a spatial element (0, r, w)."""


class NonCommutingF(PpwaveError):
    """Skew operator does not commute with the symmetric profile operator."""


class RankDeficient(PpwaveError):
    """Lattice generator list is empty or otherwise unusable."""


class BlockViolation(PpwaveError):
    """A transport matrix left the expected translation block."""


class CheckFailure(PpwaveError):
    """A verification suite found a failing check (CLI exit 3)."""


class InternalError(PpwaveError):
    """Unexpected condition that indicates a bug, not bad input (CLI exit 4)."""
