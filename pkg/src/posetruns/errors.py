"""Exception hierarchy.

Every failure raised by the library derives from :class:`PosetRunsError`,
so callers (and the CLI) can catch one type.  Structural problems with
inputs derive from :class:`ValidationError`.
"""


class PosetRunsError(Exception):
    """Base class for all library errors."""


class ValidationError(PosetRunsError, ValueError):
    """An input violates a structural invariant."""


# -- poset structure --------------------------------------------------------

class NoUniqueMinimum(ValidationError):
    pass


class Cycle(ValidationError):
    pass


class NonCoverEdge(ValidationError):
    def __init__(self, edge, witness):
        self.edge = edge
        self.witness = witness
        super().__init__(
            f"edge {edge[0]!r} -> {edge[1]!r} is implied by the longer path "
            f"{' -> '.join(map(repr, witness))}"
        )


class Unreachable(ValidationError):
    pass


class UnknownElement(PosetRunsError, KeyError):
    def __str__(self):
        return f"unknown element {self.args[0]!r}"


class EnumerationBudgetExceeded(PosetRunsError):
    pass


# -- distributions ----------------------------------------------------------

class TailTooLarge(PosetRunsError):
    pass


class NotATree(ValidationError):
    pass


class NegativeMass(ValidationError):
    pass


class ZeroUpf(ValidationError):
    pass


class NonPositiveUpf(ValidationError):
    pass


# -- kernels ----------------------------------------------------------------

class RowSumError(ValidationError):
    pass


class SupportError(ValidationError):
    pass


class ZeroOnCover(ValidationError):
    pass


class NotRecurrent(PosetRunsError):
    pass


class ZeroInvariant(PosetRunsError):
    pass


# -- families ---------------------------------------------------------------

class InvalidTail(ValidationError):
    pass


class NotLevelHomogeneous(ValidationError):
    def __init__(self, witness, masses):
        self.witness = witness
        self.masses = masses
        super().__init__(
            f"states {witness[0]!r} and {witness[1]!r} share a level but have "
            f"ascent masses {masses[0]!r} and {masses[1]!r}"
        )


class RatesSumExceedsOne(ValidationError):
    pass


class ZeroPoint(ValidationError):
    pass
