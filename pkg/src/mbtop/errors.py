"""Exception hierarchy for the mbtop package.

Validation errors (bad inputs, violated preconditions) derive from
:class:`ValidationError`; failures of the numerical machinery itself derive
from :class:`NumericalError`. The CLI maps these to exit codes 1 and 2.
"""


class MBTopError(Exception):
    """Base class for all package errors."""


class ValidationError(MBTopError, ValueError):
    """Bad input or violated precondition."""


class NumericalError(MBTopError, RuntimeError):
    """A numerical procedure failed to converge or broke down."""


class DegenerateParams(ValidationError):
    """A parameter triple with a zero component was supplied."""


class UnknownPreset(ValidationError):
    """Requested preset name is not known."""


class NotUnimodular(ValidationError):
    """Realization coefficients do not have unit determinant."""


class DegreeOverflow(ValidationError):
    """Polynomial arithmetic exceeded the configured degree budget."""


class WrongSignRegime(ValidationError):
    """Pendulum reduction requires b2*b3 < 0."""


class OnSingularRay(ValidationError):
    """The angle of the pendulum chart is undefined at this point."""


class MissingMultiplier(ValidationError):
    """Energy-Casimir evaluation requested without a multiplier."""


class ConflictingMomentum(ValidationError):
    """Configured momentum constant disagrees with the initial costate."""


class EmptyTrajectory(ValidationError):
    """An operation on trajectories received an empty one."""


class MalformedInput(ValidationError):
    """An input file does not follow the expected schema."""


class StepFailure(NumericalError):
    """Adaptive step-size control underflowed the minimum step."""


class NewtonDivergence(NumericalError):
    """The implicit-midpoint stage equation solver failed to converge."""
