"""Exception hierarchy.

Hard errors (bad input, arithmetic misuse, exhausted jets) are exceptions.
Geometric obstructions such as a Levi form of the wrong rank are *results*;
they subclass :class:`Obstruction` so the pipeline can catch them and put
their name in the report.
"""


class CRError(Exception):
    """Base class for every error raised by this package."""


# -- arithmetic ---------------------------------------------------------------

class ModeMismatch(CRError):
    pass


class ShapeMismatch(CRError):
    pass


class DivisionBySingularJet(CRError):
    pass


class JetOrderExhausted(CRError):
    pass


class IrrationalResult(CRError):
    """An exact computation needed a square root that is not rational."""


# -- parsing / input ----------------------------------------------------------

class DefiningFunctionSyntaxError(CRError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotRealValued(CRError):
    pass


class UnsupportedOperation(CRError):
    pass


class NotOnSurface(CRError):
    pass


class SingularPoint(CRError):
    pass


class DegenerateCompletion(CRError):
    pass


class ExpansionSingular(CRError):
    pass


class FormulaMismatch(CRError):
    """Two routes to the same quantity disagree: an internal bug."""


class NotHolomorphicForm(CRError):
    pass


class ManifestError(CRError):
    pass


class NotInGroup(CRError):
    pass


class FrameFamilyDegenerate(CRError):
    pass


class ConvergenceFailure(CRError):
    pass


class NotHomogeneous(CRError):
    pass


class SingularSolve(CRError):
    pass


# -- obstructions -------------------------------------------------------------

class Obstruction(CRError):
    """A hypothesis of the construction fails at the base point."""

    @property
    def name(self) -> str:
        return type(self).__name__


class NotRankNMinus1(Obstruction):
    pass


class ConditionDefiniteFails(Obstruction):
    pass


class ConditionDistinctFails(Obstruction):
    pass


class TakagiFailure(Obstruction):
    pass


class RankFullNoPsi3(Obstruction):
    pass


class Not2Nondegenerate(Obstruction):
    pass


class WrongCase(Obstruction):
    pass


class AmbiguousCase(Obstruction):
    pass
