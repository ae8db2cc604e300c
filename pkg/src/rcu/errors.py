"""Exception hierarchy shared by all rcu modules."""


class RCUError(Exception):
    """Base class for every error raised by this package."""


class SpaceMismatch(RCUError, ValueError):
    pass


class InvalidModel(RCUError, ValueError):
    """A capacity, tree or strategy breaks one of its invariants."""


class InvalidStrategy(InvalidModel):
    pass


class ConditioningOnImplausibleEvent(RCUError, ValueError):
    """Raised when conditioning on an event whose plausibility is zero."""

    def __init__(self, event):
        self.event = event
        super().__init__(f"event {event} has zero plausibility")


class CapExceeded(RCUError):
    """The number of strategies exceeds the enumeration cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} strategies exceed the cap of {cap}")
