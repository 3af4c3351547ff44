"""Exception hierarchy shared by all arcbound modules."""


class ArcboundError(Exception):
    """Base class for every error raised by this package."""


class UnboundVariableError(ArcboundError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unbound variable {self.name!r}"


class ParseError(ArcboundError, ValueError):
    pass


class InfeasibleDomainError(ArcboundError):
    pass


class UnboundedDomainError(ArcboundError):
    pass


class EngineDisagreementError(ArcboundError):
    """Branch and vertex engines produced different optima."""


class GuardError(ArcboundError, ValueError):
    """A desk-scale size guard was exceeded."""


class IndeterminateError(ArcboundError):
    """Point counts at this prime do not pin down a dimension."""


class QuadratureError(ArcboundError):
    pass
