"""Exception hierarchy shared by all ddehopf modules."""


class DdeHopfError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(DdeHopfError):
    """Operands with incompatible vector dimensions or series orders."""


class ModelError(DdeHopfError):
    """Invalid model definition, parameters or configuration."""


class NewtonError(DdeHopfError):
    """An iterative solve (equilibrium, Hopf point, epsilon root) failed to converge."""


class HopfError(DdeHopfError):
    """Hopf point location failed or produced an invalid bifurcation point."""


class ResonanceError(DdeHopfError):
    """A harmonic multiple of the critical frequency is (numerically) a characteristic
    root, so a per-harmonic linear block is singular."""


class SolvabilityError(DdeHopfError):
    """The 2x2 solvability system (or the homogeneous-fix system) is singular."""


class BelowBifurcationError(DdeHopfError):
    """Requested delay is below the bifurcation delay: no orbit on this side."""


class NoRealRootError(DdeHopfError):
    """The amplitude equation has no real root in the search bracket
    (delay beyond the validity of the truncated series)."""


class IntegrationError(DdeHopfError):
    """The DDE integrator failed (step underflow or non-finite state)."""


class SteadyStateError(DdeHopfError):
    """Steady-state oscillation was not reached within the computed trajectory."""


class ComparisonError(DdeHopfError):
    """Orbit and trajectory disagree too much to be compared (period mismatch)."""
