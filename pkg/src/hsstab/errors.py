"""Exception types shared across the package."""


class HSStabError(Exception):
    pass


class NotInRing(HSStabError, ValueError):
    """A fraction whose reduced denominator is not a power of p."""


class MixedContext(HSStabError, TypeError):
    """Operands carry different primes."""


class PatternViolation(HSStabError, ValueError):
    """A matrix does not satisfy the subgroup pattern it claims."""


class WitnessNotFound(HSStabError):
    pass


class InvalidOrder(HSStabError, ValueError):
    pass


class DomainError(HSStabError, ValueError):
    pass


class NotPartialPermutation(HSStabError, ValueError):
    pass


class DepthExceeded(HSStabError, ValueError):
    """Element coordinates are finer than the Følner frame resolution."""


class FrameTooLarge(HSStabError, ValueError):
    pass
