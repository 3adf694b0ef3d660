"""Exception types raised by bellwalk."""


class BellwalkError(Exception):
    """Base class for every error the library raises on purpose"""


class InvalidArgument(BellwalkError, ValueError):
    """An argument violates an operation's precondition"""


class UnsupportedArgument(InvalidArgument):
    """Valid mathematically, but outside what the evaluator supports"""


class DegenerateSpinor(InvalidArgument):
    """p0 = 0: the Dirac spinors are undefined"""


class UndefinedSite(BellwalkError, LookupError):
    """The conditional spin state at a lattice site is undefined (P ~ 0)"""


class Divergence(BellwalkError, ArithmeticError):
    """A relative entropy diverges (orthogonal arguments)"""


class NormDrift(BellwalkError):
    """The evolved state lost normalization beyond tolerance."""

    def __init__(self, t, drift):
        super().__init__(f"norm drift {drift:.3e} at t={t}")
        self.t = t
        self.drift = drift


class ConfigError(InvalidArgument):
    """An experiment configuration cannot be used as given"""
