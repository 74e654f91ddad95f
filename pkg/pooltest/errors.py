"""Exceptions raised by the pooling services."""


class PoolingError(Exception):
    exit_code = 2


class DomainError(PoolingError, ValueError):
    """A precondition on p, n, a grid size or a seed was violated."""


class UnsupportedSchemeError(DomainError):
    pass


class ResourceLimitError(PoolingError):
    pass


class BracketError(PoolingError):
    """No sign change on a bracket that is certified to contain a zero."""

    exit_code = 1


class RootFindError(PoolingError):
    exit_code = 1


class CapBindingError(PoolingError):
    """The brute-force argmin landed on the search cap."""

    exit_code = 1


IO_EXIT_CODE = 3
