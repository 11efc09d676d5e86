"""Exception types shared across the package."""


class LimitspecError(Exception):
    """Base class for all package-specific failures."""


class NoConvergence(LimitspecError):
    """An iterative solve exhausted its budget without meeting tolerance."""


class BranchAmbiguity(LimitspecError):
    """Square-root branch tracking could not keep argument jumps below pi/2."""


class OutsideStrip(LimitspecError):
    """A Newton iterate left the truncated semistrip."""


class StallNearBranchPoint(LimitspecError):
    """Curve corrector failed within the exclusion radius of a or b."""


class StepCollapse(LimitspecError):
    """Adaptive step halving reached the minimum step without progress."""


class InconsistentGraph(LimitspecError):
    """Assembled graph violates a structural check (e.g. single-valuedness)."""


class WanderedOffCurve(LimitspecError):
    """A quantization root landed too far from its seed curve."""


class OffCurve(LimitspecError):
    """Counting-function evaluation point is not close enough to the curve."""


class SingularB(LimitspecError):
    """Restricted B matrix of the pencil is numerically singular."""


class EigensolverFailure(LimitspecError):
    """Dense eigendecomposition backend failed."""


class DegenerateRegion(LimitspecError):
    """Omega polygon is self-intersecting or otherwise invalid."""


class DefectiveBasis(LimitspecError):
    """A selected eigenfunction is flagged near-defective."""


class TooFewTrusted(LimitspecError):
    """Fewer trusted eigenpairs than requested."""


class ConfigError(LimitspecError):
    """Invalid run configuration (CLI exit code 2)."""
