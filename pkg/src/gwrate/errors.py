"""Exception hierarchy.

Each class carries an ``exit_code`` used by the command line front end:
2 for input/parse problems, 3 for infeasible parameters, 4 for numerical
breakdown.
"""


class GWError(Exception):
    exit_code = 4


class InputError(GWError):
    exit_code = 2


class DimensionMismatch(InputError):
    pass


class AsymmetryTooLarge(InputError):
    pass


class NotPositiveSemidefinite(InputError):
    pass


class RankDeficientMarginal(InputError):
    pass


class InfeasibleError(GWError):
    exit_code = 3


class InfeasibleQw(InfeasibleError):
    def __init__(self, message, eigenvalue=None, side=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.side = side


class IdenticalPartPresent(InfeasibleError):
    pass


class WeightsOutOfRange(InfeasibleError):
    pass


class NumericalBreakdown(GWError):
    pass


class SingularTransformation(NumericalBreakdown):
    pass


class SingularQw(NumericalBreakdown):
    pass


class OracleDisagreement(NumericalBreakdown):
    pass
