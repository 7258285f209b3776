"""Exception hierarchy.

Each class carries an ``exit_code`` used by the command-line front end.
"""


class OscBathError(Exception):
    """Base class for all library errors."""

    exit_code = 5


class ConfigError(OscBathError, ValueError):
    exit_code = 2


class ModelError(OscBathError, ValueError):
    exit_code = 3


class NonPositiveFrequency(ModelError):
    pass


class UnstableModel(ModelError):
    """B is not positive definite (Schur complement of the bath block <= 0)."""

    def __init__(self, schur):
        self.schur = float(schur)
        super().__init__(
            "unstable model: omega0^2 - sum_k g_k^2/omega_k^2 = %.17g <= 0" % self.schur
        )


class UnstableDiscretization(ModelError):
    pass


class CausticError(OscBathError):
    """A normal mode sits on a focal time, sin(z_alpha t) ~ 0."""

    exit_code = 4

    def __init__(self, t, alpha, sin_value=None):
        self.t = float(t)
        self.alpha = int(alpha)
        msg = "caustic at t=%.17g: normal mode %d has sin(z t)" % (self.t, self.alpha)
        if sin_value is not None:
            msg += " = %.3e" % sin_value
        super().__init__(msg)


class NumericalError(OscBathError):
    exit_code = 5


class EigenFailure(NumericalError):
    pass


class NonPositiveEigenvalue(NumericalError):
    pass


class PoleInput(NumericalError, ValueError):
    pass


class AtPole(NumericalError, ValueError):
    pass


class NonConvergentGaussian(NumericalError):
    pass


class SingularBlock(NumericalError):
    pass


class NonPhysicalState(NumericalError):
    pass


class GridTooCoarse(NumericalError, ValueError):
    pass


class StepTooLarge(NumericalError, ValueError):
    pass


class StepCollision(NumericalError, ValueError):
    pass


class TimeOutOfRange(NumericalError, ValueError):
    pass


class DimensionMismatch(NumericalError, ValueError):
    pass
