"""Exception hierarchy shared by every module."""


class CPNilpError(Exception):
    """Base class for all errors raised by cpnilp."""


class IllConditioned(CPNilpError):
    """A rank or zero decision could not be certified by the singular-value gap."""


class DimensionMismatch(CPNilpError, ValueError):
    pass


class LengthMismatch(CPNilpError, ValueError):
    pass


class InvalidArgument(CPNilpError, ValueError):
    pass


class InvalidType(InvalidArgument):
    """A type tuple violates the basic inequalities or has nonpositive entries."""


class NotPSD(CPNilpError):
    pass


class NotNilpotent(CPNilpError):
    pass


class NotInvariant(CPNilpError):
    pass


class NotInCone(CPNilpError):
    pass


class NotContractive(CPNilpError):
    pass


class NotARoot(CPNilpError):
    pass
