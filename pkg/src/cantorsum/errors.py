"""Exception types shared across the package.

`PreconditionError` (and subclasses) mean "the claim is not certifiable under
its hypotheses"; the CLI maps them to exit code 1.
"""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class EmptyIntersectionError(PreconditionError):
    pass


class NoBoundedGapsError(PreconditionError):
    pass


class NotAGapEndpointError(PreconditionError):
    pass


class ThicknessProductError(PreconditionError):
    pass


class DisjointHullsError(PreconditionError):
    pass


class ContainedInGapError(PreconditionError):
    pass


class BoxRejected(PreconditionError):
    """An interval evaluation could not certify the solver box."""

    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)
        self.hypothesis = hypothesis


class LeftSolverBox(ArithmeticError):
    """The root of H(alpha, x, .) = c is not bracketed inside the solver box."""


class DepthExhausted(RuntimeError):
    """No admissible gap-pair replacement at the current approximation depth."""


class CertificationFailed(PreconditionError):
    pass
