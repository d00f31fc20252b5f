"""Exception hierarchy shared by every module.

The command-line front end maps these onto exit codes, so each class
corresponds to one kind of failure a caller can act on.
"""

from __future__ import annotations


class ShadowError(Exception):
    """Base class for all failures raised by this package."""


class InputError(ShadowError, ValueError):
    """Malformed or inconsistent input data."""


class DomainError(InputError):
    """A point, path or parameter lies outside the domain where it is defined."""


class OrbitDefectError(DomainError):
    """Consecutive orbit points fail to match.

    ``defects`` lists every ``(i, d(sigma(x[i]), iota(x[i + 1])))`` above tolerance.
    """

    def __init__(self, message: str, defects: list[tuple[int, float]]):
        super().__init__(message)
        self.defects = defects


class CertificateError(ShadowError):
    """An expansion, hyperbolicity or homotopy certificate does not hold."""


class BudgetError(ShadowError):
    """The window or stage budget ran out before the tolerance was reached.

    ``required_window`` carries the a-priori estimate of the window that
    would have been sufficient, when one is available.
    """

    def __init__(self, message: str, required_window: int | None = None):
        super().__init__(message)
        self.required_window = required_window


class ConvergenceError(ShadowError):
    """A Newton or continuation solve failed to converge."""


class UnsupportedError(ShadowError):
    """The requested operation has no decision procedure for this space."""
