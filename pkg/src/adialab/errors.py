"""Exception hierarchy.

Numerical-guard errors (under-resolved grids, degenerate gaps) share a base
class so the command line can map them to their own exit status.
"""


class AdialabError(Exception):
    """Base class for every error raised by the package."""


class InvalidParams(AdialabError, ValueError):
    pass


class DimMismatch(AdialabError, ValueError):
    pass


class NonHermitian(AdialabError, ValueError):
    pass


class NotNormalized(AdialabError, ValueError):
    pass


class GridMismatch(AdialabError, ValueError):
    pass


class NoConvergence(AdialabError, RuntimeError):
    pass


class DegenerateMatchAmbiguity(AdialabError, RuntimeError):
    pass


class NumericalGuardError(AdialabError, RuntimeError):
    """A resolution or conditioning guard refused to run."""


class GridTooCoarse(NumericalGuardError):
    def __init__(self, phase, bound, t=None):
        self.phase = float(phase)
        self.bound = float(bound)
        self.t = t
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(
            f"per-step phase bound violated: max ||H||*dt = {self.phase:.6g}{where} "
            f"exceeds {self.bound:g}; increase steps"
        )


class PhaseUnderResolved(NumericalGuardError):
    def __init__(self, phase, bound, pair):
        self.phase = float(phase)
        self.bound = float(bound)
        self.pair = pair
        super().__init__(
            f"gap phase under-resolved for pair {pair}: max |E_nm|*dt = "
            f"{self.phase:.6g} exceeds {self.bound:g}; increase steps"
        )


class DegenerateGap(NumericalGuardError):
    def __init__(self, pair, t, gap, gap_tol):
        self.pair = pair
        self.t = float(t)
        self.gap = float(gap)
        self.gap_tol = float(gap_tol)
        super().__init__(
            f"degenerate gap for pair {pair} at t={self.t:.6g}: "
            f"|E_nm| = {self.gap:.3g} below gap_tol {self.gap_tol:g}"
        )
