"""Exception hierarchy.

Every error raised by the library derives from :class:`BorelcalcError`.  The
three intermediate classes map onto the command-line exit codes:

* :class:`InputError`      -> 1 (malformed input, bad usage)
* :class:`DomainError`     -> 2 (a mathematical precondition does not hold)
* :class:`NumericalError`  -> 3 (the computation itself failed)
"""


class BorelcalcError(Exception):
    exit_code = 3


class InputError(BorelcalcError):
    exit_code = 1


class DomainError(BorelcalcError):
    exit_code = 2


class NumericalError(BorelcalcError):
    exit_code = 3


class ParseError(InputError):
    def __init__(self, msg, pos=None):
        if pos is not None:
            msg = f"{msg} (at position {pos})"
        super().__init__(msg)
        self.pos = pos


class UnknownFunction(ParseError):
    def __init__(self, name, pos=None):
        super().__init__(f"unknown identifier {name!r}", pos)
        self.name = name


class FormatError(InputError):
    pass


class BadRange(DomainError):
    pass


class OutsideDomain(DomainError):
    pass


class TruncationError(DomainError):
    pass


class ZeroOnContour(DomainError):
    pass


class AtomOnZero(DomainError):
    def __init__(self, zeta, value):
        super().__init__(f"atom {zeta!r} is (numerically) a zero of the symbol: |phi| = {abs(value):.3e}")
        self.zeta = zeta


class NoAdmissibleRadius(DomainError):
    pass


class CountMismatch(DomainError):
    pass


class StripViolation(DomainError):
    pass


class ZeroAtOrigin(DomainError):
    pass


class TooFewZeros(DomainError):
    pass


class TailTooShort(DomainError):
    pass


class NoDecay(DomainError):
    pass


class CutoffTooLow(DomainError):
    pass


class SeriesDivisionByZero(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class NonFinite(NumericalError):
    pass


class MaxDepth(NumericalError):
    pass


class SingularSystem(NumericalError):
    def __init__(self, msg, cond=None):
        super().__init__(msg)
        self.cond = cond
