"""
Exception hierarchy for routecog.

Anything caused by bad input also derives from ValueError, so callers that
already catch ValueError keep working.
"""


class RoutecogError(Exception):
    """Base class for every error raised by the library."""


class InputError(RoutecogError, ValueError):
    """Bad input: documents, parameters, files."""


class NetworkError(InputError):
    """Network document violates the schema or an invariant."""


class ConnectivityError(NetworkError):
    """A zone cannot reach another zone."""

    def __init__(self, origin: str, dest: str):
        super().__init__(f"zone {dest} is unreachable from zone {origin}")
        self.origin = origin
        self.dest = dest


class CostError(InputError):
    """Missing or invalid cost input."""


class ChoiceError(InputError):
    """Invalid input to the route choice model."""


class NoRouteError(InputError):
    """No route connects an OD pair."""

    def __init__(self, origin: str, dest: str):
        super().__init__(f"no route from {origin} to {dest}")
        self.origin = origin
        self.dest = dest


class EnumerationLimitError(InputError):
    """Brute-force route enumeration exceeded its partial-path guard."""


class DemandError(InputError):
    """OD matrix text is malformed or inconsistent with a network."""


class ConfigError(InputError):
    """Run configuration key or value is invalid."""


class LibraryError(InputError):
    """Feature library export is malformed."""
