"""Exception types shared across the package.

The CLI maps these onto exit codes: anything wrong with the input data
(malformed files, degenerate matrices, bad anchors) exits 1, iterative
solvers that fail to reach tolerance exit 2.
"""

from __future__ import annotations


class RtpolError(Exception):
    """Base class for package errors."""


class InputError(RtpolError):
    """Malformed or invalid input; carries file path and line when known."""

    def __init__(self, message: str, *, path=None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        elif line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)


class DegenerateInputError(RtpolError):
    """Structurally valid input that is numerically unusable (zero variance, no dyads, ...)."""


class AnchorError(RtpolError):
    """The configured anchor column cannot orient the principal component."""


class ConvergenceError(RtpolError):
    """An iterative solver did not reach tolerance within its iteration budget."""

    def __init__(self, message: str, *, residual: float | None = None,
                 iterations: int | None = None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class StageError(RtpolError):
    """A report stage failed; wraps the stage name and the original error."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
