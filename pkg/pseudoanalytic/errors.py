"""Exception hierarchy. Residual-carrying errors keep the offending numbers."""

from __future__ import annotations


class PseudoanalyticError(Exception):
    """Base class for every error raised by the package."""


class DomainTooSmall(PseudoanalyticError):
    pass


class DomainMismatch(PseudoanalyticError):
    pass


class NonFiniteField(PseudoanalyticError):
    pass


class PathNotOnGrid(PseudoanalyticError):
    pass


class VfldFormatError(PseudoanalyticError):
    pass


class ScenarioError(PseudoanalyticError):
    pass


class PotentialTooLarge(PseudoanalyticError):
    pass


class AxisInDomain(PseudoanalyticError):
    pass


class NotAGeneratingPair(PseudoanalyticError):
    pass


class ResidualError(PseudoanalyticError):
    """A numerical precondition failed: ``residual`` exceeded ``tolerance``."""

    what = "residual"

    def __init__(self, residual: float, tolerance: float, detail: str = "") -> None:
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        msg = f"{self.what}: residual {self.residual:.3e} exceeds tolerance {self.tolerance:.3e}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class NonvanishingViolation(PseudoanalyticError):
    def __init__(self, min_abs: float, eps_f: float) -> None:
        self.residual = float(min_abs)
        self.tolerance = float(eps_f)
        super().__init__(
            f"factorizing function vanishes: min |f| = {self.residual:.3e} is below eps_f = {self.tolerance:.3e}"
        )


class NotAVekuaSolution(ResidualError):
    what = "not a solution of the main Vekua equation"


class ScalarPartNonzero(ResidualError):
    what = "derivative is not purely vectorial"


class NotConservative(ResidualError):
    what = "field is not conservative"


class NotAV1Solution(ResidualError):
    what = "not a solution of the successor equation"


class NotASchrodingerSolution(ResidualError):
    what = "not a solution of the Schrodinger equation"


class NotAPhiSolution(ResidualError):
    what = "vector part does not satisfy rot(f^-2 rot Phi) = 0, div Phi = 0"


class NotParallel(ResidualError):
    what = "grad f and grad rho are not parallel"


class NotOrthogonal(ResidualError):
    what = "grad f and grad rho are not orthogonal"


class NotHarmonic(ResidualError):
    what = "function is not harmonic"


class CompatibilityViolated(ResidualError):
    what = "compatibility condition violated"
