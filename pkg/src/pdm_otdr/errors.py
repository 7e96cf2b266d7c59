"""Exception types raised by the simulator."""


class SizeError(ValueError):
    """A size parameter (recursion depth, CAZAC order) is out of range."""


class DegenerateChannelError(ValueError):
    """The requested fiber is too short to hold at least two segments."""


class UndefinedMetricError(ValueError):
    """An error metric was requested over an empty set of segments."""


class FlaggedReferenceError(ValueError):
    """The chosen phase reference segment has a singular Jones matrix."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
