"""Shared error types."""


class GuardError(RuntimeError):
    """An enumeration or resource guard was exceeded.

    Raised instead of silently truncating work that would not fit the
    configured size limits (exhaustive center scans, codeword enumeration,
    Bernoulli code universes, translate searches).
    """


class ChainSearchError(RuntimeError):
    """Randomized translate search exhausted its budget without finding a
    chain meeting the guaranteed length.  In ranges where the exhaustive
    search is feasible this signals a probable implementation bug, so it is
    surfaced rather than ignored."""
