from ._ode import IntegrationError

__all__ = ["DomainError", "PreconditionError", "FocalRadiusError", "IntegrationError"]


class DomainError(ValueError):
    """Evaluation outside the region where a quantity is defined."""


class PreconditionError(ValueError):
    """A theorem or operation was invoked outside its hypotheses."""


class FocalRadiusError(PreconditionError):
    def __init__(self, message, focal_radius):
        super().__init__(f"{message}; focal radius at t = {focal_radius:.12g}")
        self.focal_radius = focal_radius
