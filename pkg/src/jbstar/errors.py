"""Exception hierarchy shared by every module of the package."""


class JBStarError(Exception):
    """Base class for all errors raised by :mod:`jbstar`."""


class NotHermitian(JBStarError):
    pass


class NotNormal(JBStarError):
    pass


class NoConvergence(JBStarError):
    pass


class ModelMismatch(JBStarError):
    """An element's coordinate vector does not belong to the given model."""


class InvalidParameter(JBStarError):
    pass


class StructureMismatch(JBStarError):
    """Two models do not share the same kind tree."""


class NotInvertible(JBStarError):
    pass


class NotUnitary(JBStarError):
    pass


class NotTripotent(JBStarError):
    pass


class BranchCut(JBStarError):
    """An eigenvalue sits on the branch cut of the requested logarithm/root."""


class DegenerateCluster(JBStarError):
    pass


class NoSpectralGap(JBStarError):
    pass


class TooFar(JBStarError):
    """Two unitaries are at distance 2 (or more); no isotope logarithm exists."""


class HypothesisNotMet(JBStarError):
    pass


class LinearityError(JBStarError):
    """An operator has the wrong linearity flag for the requested check."""


class DomainExceeded(JBStarError):
    pass


class BranchCutExhausted(JBStarError):
    pass


class GroupLawViolated(JBStarError):
    pass


class ReconstructionError(JBStarError):
    """Base class for stage-labelled reconstruction failures."""

    stage = "unknown"


class LogBranchFailure(ReconstructionError):
    stage = "log_branch"


class CentralSymmetryFailure(ReconstructionError):
    stage = "central_symmetry"


class ExtensionMismatch(ReconstructionError):
    stage = "extension"


class ConfigError(JBStarError):
    pass
