"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
it to a process status without a lookup table: 2 for domain errors, 3 for
budget errors, 1 for malformed input.
"""


class WehlerDynError(Exception):
    exit_code = 2


# -- input / parsing ---------------------------------------------------------

class ParseError(WehlerDynError):
    exit_code = 1


class SchemaError(WehlerDynError):
    exit_code = 1


# -- numeric core ------------------------------------------------------------

class ZeroVector(WehlerDynError):
    pass


class DegenerateFiber(WehlerDynError):
    """The fiber quadratic vanishes identically."""


class NonConvergence(WehlerDynError):
    exit_code = 3


# -- surfaces ----------------------------------------------------------------

class FieldMismatch(WehlerDynError):
    pass


class NotOnFiber(WehlerDynError):
    pass


class ContainedFiber(DegenerateFiber):
    """The surface contains a whole fiber of a coordinate projection."""


class NormalFormRequired(WehlerDynError):
    pass


class SingularAtV(WehlerDynError):
    pass


class BadReduction(WehlerDynError):
    pass


# -- lattices ----------------------------------------------------------------

class NotAnIsometry(WehlerDynError):
    pass


class SignatureError(WehlerDynError):
    pass


class UnreducedWord(WehlerDynError):
    pass


class NotLoxodromic(WehlerDynError):
    pass


class DegenerateAxis(WehlerDynError):
    pass


class PreconditionViolated(WehlerDynError):
    pass


class MixedLattices(WehlerDynError):
    pass


class NoGap(WehlerDynError):
    pass


class NotEigenvector(WehlerDynError):
    pass


class SameFixedLine(WehlerDynError):
    pass


class InvolutionCheckFailed(WehlerDynError):
    pass


# -- heights / budgets -------------------------------------------------------

class HeightOverflow(WehlerDynError):
    exit_code = 3


class BranchBudget(WehlerDynError):
    exit_code = 3


class PeriodicPoint(WehlerDynError):
    """A growth estimate was requested at a point with a small finite orbit."""


# -- tori --------------------------------------------------------------------

class LevelOverflow(WehlerDynError):
    exit_code = 3
