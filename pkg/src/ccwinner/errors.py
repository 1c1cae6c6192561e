"""Exception types shared across the package."""


class CCWinnerError(Exception):
    """Base class for errors raised by this package."""


class InvalidK(CCWinnerError, ValueError):
    """Committee size bound is unusable (k < 1)."""


class InvalidN(CCWinnerError, ValueError):
    """Instance size parameter out of range."""


class NonIntegerRho(CCWinnerError, TypeError):
    """Operation requires an all-integer misrepresentation matrix."""


class NotATree(CCWinnerError, ValueError):
    """Parent links and child orders do not describe a rooted tree."""


class InvalidTiling(CCWinnerError, ValueError):
    """Rectangles overlap, leave gaps, or fall outside the grid."""


class BudgetExceeded(CCWinnerError, RuntimeError):
    """An enumeration would exceed the configured work budget."""


class RejectionBudgetExceeded(BudgetExceeded):
    """Rejection sampling failed to reach its target within the attempt budget."""


class AlgorithmStructureMismatch(CCWinnerError, ValueError):
    """Requested algorithm cannot run on the instance's structure."""


class ParseError(CCWinnerError, ValueError):
    """Instance or result file is malformed."""
