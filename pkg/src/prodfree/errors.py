"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ProdFreeError(Exception):
    """Base class for all errors raised by this package."""


class ResourceError(ProdFreeError):
    """A configured memory, size or evaluation budget would be exceeded."""


class FormatError(ProdFreeError):
    """A prime cache file is malformed."""

    def __init__(self, message: str, offset: int, field: str | None = None):
        self.offset = offset
        self.field = field
        where = f" (field {field!r})" if field else ""
        super().__init__(f"{message} at byte offset {offset}{where}")


class DomainError(ProdFreeError, ValueError):
    """An argument lies outside the domain of the operation."""


class OverflowLimitError(ProdFreeError):
    """An enumeration would exceed its cap or the exact-integer range."""


class CertificateError(ProdFreeError):
    """A product-freeness certificate could not be established."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class PreconditionError(ProdFreeError):
    """Inputs violate a documented precondition; ``witness`` shows why."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ConsistencyError(ProdFreeError):
    """Two independent evaluations of one quantity disagree beyond their bounds."""
