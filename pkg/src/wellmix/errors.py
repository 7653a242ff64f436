"""Exception hierarchy shared by all wellmix modules."""


class WellmixError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(WellmixError, ValueError):
    pass


class ReducibleModulus(WellmixError, ValueError):
    pass


class DegreeMismatch(WellmixError, ValueError):
    pass


class DivisionByZero(WellmixError, ZeroDivisionError):
    pass


class TooLargeToMaterialize(WellmixError):
    pass


class InvalidVertexId(WellmixError, ValueError):
    pass


class DuplicateVertex(WellmixError, ValueError):
    pass


class NotSymmetric(WellmixError, ValueError):
    pass


class NoConvergence(WellmixError, ArithmeticError):
    pass


class UnknownVariable(WellmixError, KeyError):
    pass


class MissingVariable(UnknownVariable):
    pass


class PartialFunction(WellmixError, ValueError):
    pass


class NonHalting(WellmixError):
    pass


class KeyDisagreement(WellmixError):
    """Alice and Bob computed different keys on some branch."""

    def __init__(self, branch, key_alice, key_bob):
        self.branch = branch
        self.key_alice = key_alice
        self.key_bob = key_bob
        super().__init__(f"keys differ on branch {branch}: alice={key_alice!r} bob={key_bob!r}")


class SearchSpaceTooLarge(WellmixError):
    pass


class InvalidElement(WellmixError, ValueError):
    pass
