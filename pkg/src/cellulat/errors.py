"""Exception types raised by the simulation engine."""


class CellulatError(Exception):
    """Base class for all engine errors."""


class UnknownSpecies(CellulatError):
    pass


class UnknownLevel(CellulatError):
    pass


class DuplicateInitializer(CellulatError):
    pass


class InsufficientQuantity(CellulatError):
    """Remove asked for more than the locus holds; nothing was applied."""


class NegativeQuantity(CellulatError):
    pass


class FlagDomain(CellulatError):
    """Flag species only admit set operations with value 0 or 1."""


class LesionError(CellulatError):
    """Lesion refers to an unknown target or an invalid window."""


class LesionSpecError(CellulatError):
    """Lesion spec string does not match the documented grammar."""


class ModelError(CellulatError):
    """Model text failed to parse or validate; carries diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid model: {lines}")
