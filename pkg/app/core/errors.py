"""
Error Types Module.

This module contains the exception hierarchy shared by every compute module.
Parameter and validation problems derive from ``ValueError``; numerical
failures derive from ``ArithmeticError`` so callers can catch by family.
"""


class CatronError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(CatronError, ValueError):
    """Invalid physical or numerical input."""


class NumericalError(CatronError, ArithmeticError):
    """A numerical procedure failed or lost accuracy."""


# model-core
class NonPositiveEta(ParameterError):
    pass


class NegativeDrive(ParameterError):
    pass


class DegenerateGrid(ParameterError):
    pass


class NotBistable(ParameterError):
    pass


class ConfigError(ParameterError):
    pass


# specfun
class PoleAtNonPositiveInteger(ParameterError):
    pass


class DomainTooSmall(ParameterError):
    pass


class NoConvergence(NumericalError):
    pass


class StiffnessFailure(NumericalError):
    pass


# fock-numerics
class CutoffTooSmall(ParameterError):
    pass


class MemoryBudgetExceeded(ParameterError):
    pass


class StepTooLarge(ParameterError):
    pass


class RankDeficiencyAmbiguous(NumericalError):
    pass


class NoNonzeroEigenvalue(NumericalError):
    pass


class CutoffInadequate(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    pass


# analytic-wigner / instanton
class TurningPointProximity(ParameterError):
    pass


class BranchCutProximity(ParameterError):
    pass


class SingularAtOrigin(ParameterError):
    pass


class OutsideAsymptoticWindow(ParameterError):
    pass


class MassDeficient(NumericalError):
    pass


class NoEscapeDirection(NumericalError):
    pass


class DriftExceeded(NumericalError):
    pass


class RateFormsDisagree(NumericalError):
    pass