"""Exception hierarchy shared by all loqckit modules.

Everything the command line maps to exit code 1 derives from ``DomainError``.
"""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class StructuralError(DomainError):
    """A netlist is malformed (overlapping modes in a stage, bad indices)."""


class FitError(DomainError):
    """A fit could not be set up or did not produce a usable result."""


class NoResonanceError(FitError):
    """No transmission dip deep enough to fit was found in the window."""


class LowContrastError(FitError):
    """Interferometer fringes are too shallow to locate their maxima."""


class IdentifiabilityError(FitError):
    """The data does not determine one or more model quantities."""


class DegenerateCircuitError(DomainError):
    """A computational input never yields a post-selectable outcome."""
