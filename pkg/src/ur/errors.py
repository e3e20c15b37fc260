"""Exception hierarchy shared by the library and the command line."""


class URError(Exception):
    """Base class for every error raised by ``ur``."""


class ShapeError(URError, ValueError):
    pass


class ContractViolation(URError, ValueError):
    """An input breaks a documented precondition (non-Hermitian, non-unitary, ...)."""


class ModelTooLarge(URError, ValueError):
    pass


class ModelInvalid(URError, ValueError):
    """A measurement model breaks a commutation premise."""


class DomainError(URError, ValueError):
    pass


class NumericalContamination(URError, ArithmeticError):
    """A quantity that must be real came back with a large imaginary part."""


class PremiseError(URError, ValueError):
    pass


class SchemaError(URError, ValueError):
    """Model file failed validation. ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
