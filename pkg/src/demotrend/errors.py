"""Exception hierarchy shared by the whole package.

Every failure demotrend raises on purpose derives from DemotrendError, so the
command line front end can catch one type, print the message to stderr and
exit nonzero without swallowing genuine bugs.
"""


class DemotrendError(Exception):
    """Base class for all demotrend failures."""


class SeriesError(DemotrendError):
    """Invalid series construction or a violated operation precondition."""


class DegenerateInputError(DemotrendError):
    """Input with no usable signal: zero variance, collinear or singular."""


class SchemaError(DemotrendError):
    """A data file does not conform to its declared schema."""


class ConfigError(DemotrendError):
    """Invalid command line arguments or config file contents."""
