"""Trajectory integration with invariant-drift instrumentation.

The top system is integrated through one of three methods (fixed RK4, an
adaptive Dormand-Prince 5(4) pair, or the implicit midpoint rule, which
conserves both first integrals to solver tolerance since they are
quadratic). A compiled kernel is used when the ``mbtop._fastpath``
extension built; set ``MBTOP_PURE=1`` to force the pure-Python fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import odes
from .core import Params, as_state, first_integrals, vector_field
from .errors import EmptyTrajectory

try:  # pragma: no cover - exercised indirectly
    from . import _fastpath
except ImportError:  # pragma: no cover
    _fastpath = None

__all__ = [
    "IntegratorSpec",
    "Trajectory",
    "METHODS",
    "backend_name",
    "integrate",
    "integrate_generic",
    "drift_report",
]

METHODS = ("rk4_fixed", "rk45_adaptive", "implicit_midpoint")


def backend_name() -> str:
    """Which top-system kernel is active: 'compiled' or 'pure'."""
    if _fastpath is not None and os.environ.get("MBTOP_PURE", "") != "1":
        return "compiled"
    return "pure"


@dataclass(frozen=True)
class IntegratorSpec:
    """Method selection and tolerances for a single integration."""

    method: str = "rk45_adaptive"
    step: float = 0.01
    rtol: float = 1e-10
    atol: float = 1e-12
    newton_tol: float = 1e-13
    newton_max_iters: int = 50

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.rtol <= 0 or self.atol <= 0 or self.newton_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled states with per-sample first-integral values."""

    times: np.ndarray
    states: np.ndarray
    H_series: np.ndarray
    C_series: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)


def _output_grid(t_end: float, n_out: int) -> np.ndarray:
    if n_out < 2:
        raise ValueError("n_out must be >= 2")
    return np.linspace(0.0, t_end, n_out)


def integrate(
    b: Params, x0, t_end: float, spec: IntegratorSpec | None = None, n_out: int = 201
) -> Trajectory:
    """Integrate the top system from x0 over [0, t_end].

    Output is sampled on a uniform grid of ``n_out`` points via cubic
    Hermite interpolation on accepted steps; H and C are evaluated at the
    stored points. ``t_end == 0`` yields the single-point trajectory at x0.
    """
    x0 = as_state(x0)
    spec = spec or IntegratorSpec()
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if t_end == 0:
        times = np.zeros(1)
        states = x0[None, :].copy()
    else:
        times = _output_grid(t_end, n_out)
        states = _run_top(b, x0, t_end, spec, times)
    H = np.empty(len(times))
    C = np.empty(len(times))
    for i, x in enumerate(states):
        H[i], C[i], _ = first_integrals(b, x)
    return Trajectory(times, states, H, C)


def _run_top(b, x0, t_end, spec, t_out):
    if backend_name() == "compiled":
        if spec.method == "rk4_fixed":
            return _fastpath.rk4_top(b.b1, b.b2, b.b3, x0, t_end, spec.step, t_out)
        if spec.method == "rk45_adaptive":
            return _fastpath.dopri_top(
                b.b1, b.b2, b.b3, x0, t_end, spec.rtol, spec.atol, t_out
            )
        return _fastpath.midpoint_top(
            b.b1,
            b.b2,
            b.b3,
            x0,
            t_end,
            spec.step,
            spec.newton_tol,
            spec.newton_max_iters,
            t_out,
        )

    def f(x):
        return vector_field(b, x)

    def jac(x):
        return np.array(
            [
                [0.0, b.b1, 0.0],
                [b.b2 * x[2], 0.0, b.b2 * x[0]],
                [b.b3 * x[1], b.b3 * x[0], 0.0],
            ]
        )

    return _dispatch_generic(f, x0, t_end, spec, t_out, jac)


def _dispatch_generic(f, x0, t_end, spec, t_out, jac=None):
    if spec.method == "rk4_fixed":
        return odes.rk4_fixed(f, x0, t_end, spec.step, t_out)
    if spec.method == "rk45_adaptive":
        return odes.dopri45(f, x0, t_end, spec.rtol, spec.atol, t_out)
    return odes.implicit_midpoint(
        f, x0, t_end, spec.step, t_out, spec.newton_tol, spec.newton_max_iters, jac
    )


def integrate_generic(
    f, x0, t_end, spec: IntegratorSpec, n_out: int | None = 201, jac=None, t_out=None
):
    """Integrate an arbitrary right-hand side with the same method set.

    Used for the planar pendulum system and the costate/kinematics stack;
    always runs the pure-Python steppers. Output times are a uniform grid
    of ``n_out`` points unless an explicit sorted ``t_out`` is given.
    Returns (times, states).
    """
    x0 = np.asarray(x0, dtype=float)
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if t_end == 0:
        return np.zeros(1), x0[None, :].copy()
    times = np.asarray(t_out, dtype=float) if t_out is not None else _output_grid(
        t_end, n_out
    )
    states = _dispatch_generic(f, x0, t_end, spec, times, jac)
    return times, states


def drift_report(traj: Trajectory) -> tuple[float, float]:
    """Max absolute deviation of H and C from their initial values."""
    if len(traj) == 0:
        raise EmptyTrajectory("trajectory has no samples")
    dH = float(np.max(np.abs(traj.H_series - traj.H_series[0])))
    dC = float(np.max(np.abs(traj.C_series - traj.C_series[0])))
    return dH, dC
