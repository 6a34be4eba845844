"""Shared exception types."""


class CapExceededError(RuntimeError):
    """An enumeration or support-size cap was exceeded.

    Raised instead of silently truncating; the message names the cap and the
    size that triggered it.
    """

    def __init__(self, what: str, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class ChannelFormatError(ValueError):
    """A channel document or polynomial expression could not be parsed."""


class ConditionNotSatisfiedError(RuntimeError):
    """A pipeline step requires rational independence that does not hold.

    Carries the offending report so callers can surface the certificate.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
