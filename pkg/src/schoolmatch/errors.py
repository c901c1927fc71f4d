"""Exception and warning types shared across the package."""


class InstanceValidationError(ValueError):
    """Raised when an instance description violates one or more invariants.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SizeGuardError(ValueError):
    """An exhaustive search was requested beyond its hard size guard."""


class CommonPriorityError(ValueError):
    """An operation requiring one shared priority order got differing orders."""


class LemmaViolationError(AssertionError):
    """Two computation paths that must agree returned different results.

    Signals an implementation bug; never expected on valid inputs.
    """


class UnknownClaimError(KeyError):
    """Requested claim id is not in the catalog."""


class FixtureMismatchError(AssertionError):
    """A fixture reproduction diverged from its frozen expected values."""


class SmallMarketWarning(UserWarning):
    """Instance has no more students than schools.

    The mechanisms stay well defined; the warning flags that constructions
    relying on excess demand may behave degenerately.
    """
