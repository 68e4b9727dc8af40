"""Exception hierarchy shared by the library and the CLI."""


class TcfsimError(Exception):
    """Base class for every error raised by tcfsim."""


class DomainError(TcfsimError, ValueError):
    """An argument lies outside the domain where the model is valid."""


class ConfigurationError(TcfsimError, ValueError):
    """Invalid design parameters or run configuration."""


class ModelError(TcfsimError):
    """Inconsistent finite-element model (bad element, missing state)."""


class MechanismError(TcfsimError):
    """Stiffness factorization failed: mechanism or buckled model."""


class BuckledError(TcfsimError):
    """Prestress exceeds the critical load of the structure."""


class NumericalError(TcfsimError):
    """A numerical result failed its accuracy check or is not finite."""


class ClassificationError(TcfsimError):
    """No eigenmode could be identified as the resonator flexural mode."""
