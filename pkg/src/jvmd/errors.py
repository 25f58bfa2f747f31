"""Exception hierarchy shared by every module of the package."""


class JvmdError(Exception):
    """Base class for all package errors."""


class InvalidFrameError(JvmdError, ValueError):
    """A sampled frame violates the length/finiteness/sample-rate rules."""


class DimensionMismatchError(JvmdError, ValueError):
    pass


class InvalidConfigError(JvmdError, ValueError):
    pass


class InvalidInputError(JvmdError, ValueError):
    pass


class UndecidableError(JvmdError, ValueError):
    """Classification is impossible for the given query (e.g. a zero vector)."""


class DatasetError(JvmdError, ValueError):
    pass


class DivergenceError(JvmdError, ArithmeticError):
    """An ADMM iterate became non-finite."""

    def __init__(self, iteration, detail="non-finite iterate"):
        self.iteration = iteration
        super().__init__(f"solver diverged at iteration {iteration}: {detail}")


class FrameFormatError(JvmdError, ValueError):
    """Malformed frame file. ``offset`` is the byte position of the failure."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class BadMagicError(FrameFormatError):
    pass


class UnsupportedVersionError(FrameFormatError):
    pass


class TruncatedFileError(FrameFormatError):
    pass
