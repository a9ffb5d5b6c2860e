"""Reduction of the top to a pendulum on level surfaces of H0.

When b2*b3 < 0 the level set x2^2 - (b2/b3) x3^2 = 2H (H > 0) is an
ellipse in the (x2, x3) plane; in the angle chart

    x1 = (gamma/b3) * theta_dot,
    x2 = sqrt(2H) * cos(theta),
    x3 = gamma * sqrt(2H) * sin(theta),      gamma = sqrt(-b3/b2),

the dynamics become theta_ddot = (b1*b3/gamma) * sqrt(2H) * cos(theta).
This module implements the chart in both directions and a two-route
verification that integrates the top directly and through the pendulum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Params, as_state, first_integrals
from .errors import OnSingularRay, WrongSignRegime
from .integrate import IntegratorSpec, integrate, integrate_generic

__all__ = [
    "PendulumState",
    "ReductionContext",
    "make_context",
    "to_pendulum",
    "from_pendulum",
    "pendulum_accel",
    "pendulum_energy",
    "integrate_pendulum",
    "verify_reduction",
]

#: levels below this are treated as the singular ray (division blow-up)
H_MIN = 1e-12


@dataclass(frozen=True)
class PendulumState:
    theta: float
    theta_dot: float
    H: float  # level value of H0, must be positive

    def __post_init__(self):
        if self.H <= 0:
            raise ValueError(f"level value H must be positive, got {self.H!r}")


@dataclass(frozen=True)
class ReductionContext:
    b: Params
    gamma: float


def make_context(b: Params) -> ReductionContext:
    """Context for the reduction; requires the definite regime b2*b3 < 0."""
    if b.b2 * b.b3 >= 0:
        raise WrongSignRegime(
            f"reduction requires b2*b3 < 0, got b2*b3 = {b.b2 * b.b3!r}"
        )
    return ReductionContext(b, math.sqrt(-b.b3 / b.b2))


def to_pendulum(ctx: ReductionContext, x) -> PendulumState:
    """Invert the chart at a point with H0(x) > 0.

    theta is the atan2 of (x3/gamma, x2); theta_dot = (b3/gamma) * x1.
    """
    x = as_state(x)
    _, _, h0 = first_integrals(ctx.b, x)
    if h0 < H_MIN or x[1] ** 2 + (x[2] / ctx.gamma) ** 2 < H_MIN:
        raise OnSingularRay(
            f"H0(x) = {h0!r} too small; the angle chart is undefined here"
        )
    theta = math.atan2(x[2] / ctx.gamma, x[1])
    theta_dot = ctx.b.b3 * x[0] / ctx.gamma
    return PendulumState(theta, theta_dot, h0)


def from_pendulum(ctx: ReductionContext, p: PendulumState) -> np.ndarray:
    """The chart itself: (theta, theta_dot, H) -> (x1, x2, x3)."""
    amp = math.sqrt(2.0 * p.H)
    return np.array(
        [
            ctx.gamma / ctx.b.b3 * p.theta_dot,
            amp * math.cos(p.theta),
            ctx.gamma * amp * math.sin(p.theta),
        ]
    )


def pendulum_accel(ctx: ReductionContext, H: float, theta: float) -> float:
    """theta_ddot on the level H."""
    if H <= 0:
        raise ValueError("level value H must be positive")
    return ctx.b.b1 * ctx.b.b3 / ctx.gamma * math.sqrt(2.0 * H) * math.cos(theta)


def pendulum_energy(ctx: ReductionContext, H: float, theta, theta_dot):
    """Conserved energy of the reduced oscillator.

    E = theta_dot^2/2 - (b1*b3/gamma) * sqrt(2H) * sin(theta); constant
    along solutions of the reduced equation.
    """
    g = ctx.b.b1 * ctx.b.b3 / ctx.gamma * math.sqrt(2.0 * H)
    return 0.5 * np.asarray(theta_dot) ** 2 - g * np.sin(np.asarray(theta))


def integrate_pendulum(
    ctx: ReductionContext,
    p0: PendulumState,
    t_end: float,
    spec: IntegratorSpec | None = None,
    n_out: int = 201,
):
    """Integrate the planar (theta, theta_dot) system on the level p0.H.

    Returns (times, thetas, theta_dots); theta evolves continuously (the
    integrator never wraps the angle).
    """
    spec = spec or IntegratorSpec()
    g = ctx.b.b1 * ctx.b.b3 / ctx.gamma * math.sqrt(2.0 * p0.H)

    def f(y):
        return np.array([y[1], g * math.cos(y[0])])

    def jac(y):
        return np.array([[0.0, 1.0], [-g * math.sin(y[0]), 0.0]])

    times, states = integrate_generic(
        f, [p0.theta, p0.theta_dot], t_end, spec, n_out, jac
    )
    return times, states[:, 0], states[:, 1]


def verify_reduction(
    ctx: ReductionContext,
    x0,
    t_end: float,
    spec: IntegratorSpec | None = None,
    n_out: int = 201,
) -> float:
    """Two-route discrepancy between the top flow and the pendulum route.

    Route (a) integrates the top directly from x0; route (b) integrates
    (theta, theta_dot) from the chart image of x0 and maps back. Returns
    the max infinity-norm difference over the shared output grid.
    """
    spec = spec or IntegratorSpec()
    x0 = as_state(x0)
    if t_end == 0:
        return 0.0
    direct = integrate(ctx.b, x0, t_end, spec, n_out)
    p0 = to_pendulum(ctx, x0)
    _, thetas, theta_dots = integrate_pendulum(ctx, p0, t_end, spec, n_out)
    mapped = np.stack(
        [
            from_pendulum(ctx, PendulumState(th, thd, p0.H))
            for th, thd in zip(thetas, theta_dots)
        ]
    )
    return float(np.max(np.abs(direct.states - mapped)))
