"""
Exception hierarchy shared by the library and the command line front end
"""

from typing import Optional


class DiscrepancyError(Exception):
    """Base class for every error raised by this package"""

    exit_code = 2


class UsageError(DiscrepancyError, ValueError):
    """Bad arguments: wrong lengths, malformed variant words, bad thresholds"""


class FormatError(UsageError):
    """Malformed permutation or coloring input, with a line/column position"""

    def __init__(self, reason: str, line: int = 1, column: int = 1, source: Optional[str] = None):
        self.reason = reason
        self.line = line
        self.column = column
        self.source = source or "<input>"
        super().__init__(f"{self.source}:{line}:{column}: {reason}")


class DomainError(DiscrepancyError, ValueError):
    """Operation undefined for the given family or coloring"""


class ResourceLimitError(DiscrepancyError):
    """Refusal to run an enumeration or dense computation beyond its hard cap"""


class WitnessInvariantError(DiscrepancyError, AssertionError):
    """A replayed witness broke its certified bound: an implementation bug"""

    exit_code = 1
