"""Exception types shared by every module."""

from __future__ import annotations


class LsysError(ValueError):
    """Base class for all errors raised by lsyscalc."""


class DomainError(LsysError):
    """An argument lies outside the domain of an operation."""

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point


class PoleError(LsysError):
    """Evaluation hit a pole.

    ``path`` names the subexpression whose denominator vanished, root first.
    """

    def __init__(self, message: str, path: tuple[str, ...] = (), point: complex | None = None):
        if path:
            message = f"{message} (at {'/'.join(path)})"
        super().__init__(message)
        self.path = tuple(path)
        self.point = point


class SpectralPointError(PoleError):
    """The rank-one coefficient of the model resolvent is singular at z."""


class ClassError(LsysError):
    """A function does not belong to the Donoghue class an operation requires."""


class NormalizationError(LsysError):
    """A Livsic function or model measure is not normalized as required."""

    def __init__(self, message: str, measured: complex | float | None = None):
        super().__init__(message)
        self.measured = measured


class ConsistencyError(LsysError):
    """An internal identity that must hold by construction failed."""


class SchemaError(LsysError):
    """A JSON document does not match the expected schema."""
