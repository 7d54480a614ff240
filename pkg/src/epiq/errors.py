"""Exception types shared across the package."""


class EpiqError(Exception):
    """Base class for every error raised by this package."""


class DimMismatch(EpiqError):
    pass


class NotHermitian(EpiqError):
    pass


class NoConvergence(EpiqError):
    pass


class NotNormalized(EpiqError):
    pass


class NotOrthonormal(EpiqError):
    pass


class LikelihoodOutOfRange(EpiqError):
    pass


class IncompletePOVM(EpiqError):
    pass


class NotProjector(EpiqError):
    pass


class ZeroProbability(EpiqError):
    pass


class NotAdditive(EpiqError):
    pass


class NotUnit(EpiqError):
    pass


class GridMismatch(EpiqError):
    pass


class NotProportional(EpiqError):
    pass


class ThetaOutOfRange(EpiqError):
    pass


class NonMonotoneRule(EpiqError):
    pass


class RankDeficient(EpiqError):
    pass


class NotADistribution(EpiqError):
    pass


class NotAGroup(EpiqError):
    pass


class NotPermissible(EpiqError):
    pass


class SpaceTooLarge(EpiqError):
    pass


class SupportEscape(EpiqError):
    pass


class BoundaryMassLoss(EpiqError):
    pass


class NodeEncountered(EpiqError):
    pass


class PathEscape(EpiqError):
    pass


class UnknownScenario(EpiqError):
    pass


class BadFlag(EpiqError):
    pass
