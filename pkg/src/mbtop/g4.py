"""Optimal control of a drift-free invariant system on a nilpotent group.

The configuration space is the group of 4x4 unipotent upper-triangular
matrices

    X = [[1, x2, x3,     x4],
         [0,  1, x1, x1^2/2],
         [0,  0,  1,     x1],
         [0,  0,  0,      1]]

(car kinematics). For the two-input system Xdot = X (A1 u1 + A2 u2) with
quadratic cost (1/2) int (c1 u1^2 + c2 u2^2) dt, the extremal controls are
u1 = z1/c1, u2 = z2/c2 where the costate z solves

    z1' = z2 z3 / c2,  z2' = -z1 z3 / c1,  z3' = -z1 z4 / c1,  z4' = 0.

With k := z4, the reduced (z1, z2, z3) system is a member of the
Maxwell-Bloch top family under the relabeling z1 = y2, z2 = y3, z3 = y1,
with parameters b = (-k/c1, 1/c2, -1/c1). Everything in this module is
built on that bridge: invariants, Poisson form, pendulum route, and
equilibrium classification all delegate to the top machinery.

Only the forward problem is solved: given an initial costate, produce the
extremal controls, the state trajectory, and the accumulated cost. No
two-point boundary shooting is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Params, make_params, vector_field
from .errors import ConflictingMomentum
from .integrate import IntegratorSpec, integrate_generic
from .stability import Equilibrium, EquilibriumReport, nonlinear_classify

__all__ = [
    "ControlConfig",
    "G4Result",
    "lie_basis",
    "embed",
    "costate_rhs",
    "reduced_rhs",
    "to_mbtop",
    "z_to_y",
    "y_to_z",
    "g4_invariants",
    "g4_pi_matrix",
    "optimal_controls",
    "reconstruct",
    "classify_g4_equilibrium",
    "classify_g4_equilibria",
    "g4_pendulum_accel",
]

MOMENTUM_TOL = 1e-12


@dataclass(frozen=True)
class ControlConfig:
    """Cost weights, momentum constant, and the control horizon."""

    c1: float
    c2: float
    k: float
    t_f: float = math.inf

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("cost weights c1, c2 must be positive")
        if self.k == 0:
            raise ValueError("momentum constant k must be nonzero")
        if self.t_f <= 0:
            raise ValueError("horizon t_f must be positive")


def lie_basis():
    """Basis (A1, A2, A3, A4) of the algebra, with bracket certificates.

    A1 and A2 are the generators; A3 = [A2, A1] and A4 = [A3, A1] are
    computed as commutators and certified entrywise, along with the
    nilpotency tail [A4, Ai] = 0.
    """
    A1 = np.zeros((4, 4))
    A1[1, 2] = 1.0
    A1[2, 3] = 1.0
    A2 = np.zeros((4, 4))
    A2[0, 1] = 1.0
    A3 = A2 @ A1 - A1 @ A2
    A4 = A3 @ A1 - A1 @ A3
    expected_A3 = np.zeros((4, 4))
    expected_A3[0, 2] = 1.0
    expected_A4 = np.zeros((4, 4))
    expected_A4[0, 3] = 1.0
    assert np.array_equal(A3, expected_A3)
    assert np.array_equal(A4, expected_A4)
    for A in (A1, A2, A3, A4):
        assert np.array_equal(A4 @ A - A @ A4, np.zeros((4, 4)))
    return A1, A2, A3, A4


def embed(x) -> np.ndarray:
    """Coordinates (x1, x2, x3, x4) -> unipotent matrix."""
    x1, x2, x3, x4 = x
    return np.array(
        [
            [1.0, x2, x3, x4],
            [0.0, 1.0, x1, 0.5 * x1 * x1],
            [0.0, 0.0, 1.0, x1],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def costate_rhs(cfg: ControlConfig, z) -> np.ndarray:
    """Full 4-component costate field; the last component is always 0."""
    z1, z2, z3, z4 = z
    return np.array(
        [z2 * z3 / cfg.c2, -z1 * z3 / cfg.c1, -z1 * z4 / cfg.c1, 0.0]
    )


def reduced_rhs(cfg: ControlConfig, z) -> np.ndarray:
    """Reduced 3-component field with z4 frozen at cfg.k."""
    z1, z2, z3 = z
    return np.array(
        [z2 * z3 / cfg.c2, -z1 * z3 / cfg.c1, -cfg.k * z1 / cfg.c1]
    )


def to_mbtop(cfg: ControlConfig) -> Params:
    """Parameters of the top member conjugate to the reduced costate flow.

    Under z1 = y2, z2 = y3, z3 = y1 the reduced system becomes the top
    with b = (-k/c1, 1/c2, -1/c1).
    """
    return make_params(-cfg.k / cfg.c1, 1.0 / cfg.c2, -1.0 / cfg.c1)


def z_to_y(z) -> np.ndarray:
    """Relabeling (z1, z2, z3) -> (y1, y2, y3) = (z3, z1, z2)."""
    z = np.asarray(z, dtype=float)
    return z[..., [2, 0, 1]]


def y_to_z(y) -> np.ndarray:
    """Inverse relabeling (y1, y2, y3) -> (z1, z2, z3) = (y2, y3, y1)."""
    y = np.asarray(y, dtype=float)
    return y[..., [1, 2, 0]]


def g4_invariants(cfg: ControlConfig, z) -> tuple[float, float]:
    """The two first integrals of the reduced costate flow.

    Ht = -(k/(2 c1)) * (z1^2 + (c1/c2) z2^2);  Ct = z2 - z3^2/(2k).
    """
    z1, z2, z3 = z[0], z[1], z[2]
    ht = -(cfg.k / (2.0 * cfg.c1)) * (z1 * z1 + (cfg.c1 / cfg.c2) * z2 * z2)
    ct = z2 - z3 * z3 / (2.0 * cfg.k)
    return float(ht), float(ct)


def g4_invariant_grads(cfg: ControlConfig, z):
    z1, z2, z3 = z[0], z[1], z[2]
    grad_ht = np.array([-(cfg.k / cfg.c1) * z1, -(cfg.k / cfg.c2) * z2, 0.0])
    grad_ct = np.array([0.0, 1.0, -z3 / cfg.k])
    return grad_ht, grad_ct


def g4_pi_matrix(cfg: ControlConfig, z) -> np.ndarray:
    """Poisson matrix of the reduced flow: rhs = Pi @ grad(Ht)."""
    z3 = z[2]
    w = z3 / cfg.k
    return np.array([[0.0, -w, -1.0], [w, 0.0, 0.0], [1.0, 0.0, 0.0]])


def optimal_controls(cfg: ControlConfig, z) -> tuple[float, float]:
    """Extremal controls (z1/c1, z2/c2)."""
    return float(z[0] / cfg.c1), float(z[1] / cfg.c2)


@dataclass(frozen=True)
class G4Result:
    times: np.ndarray
    states: np.ndarray  # (n, 4) group coordinates
    costates: np.ndarray  # (n, 4)
    controls: np.ndarray  # (n, 2)
    cost: float
    residual: float


def reconstruct(
    cfg: ControlConfig,
    x0,
    z0,
    t_end: float,
    spec: IntegratorSpec | None = None,
    n_out: int = 201,
    residual_checks: int = 33,
) -> G4Result:
    """Co-integrate costate, group coordinates, and running cost.

    The controls are fed back from the costate at every stage evaluation,
    so the cost integral is accumulated by the integrator's own
    quadrature. ``residual`` is a diagnostic: the matrix equation
    Xdot = X (A1 u1 + A2 u2) is checked at ``residual_checks`` interior
    times using central finite differences (step 1e-4 * t_end) on dense
    output against the algebraic right-hand side.
    """
    spec = spec or IntegratorSpec()
    if t_end > cfg.t_f:
        raise ValueError(f"t_end = {t_end!r} exceeds the horizon t_f = {cfg.t_f!r}")
    x0 = np.asarray(x0, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    if x0.shape != (4,) or z0.shape != (4,):
        raise ValueError("x0 and z0 must have 4 components")
    if abs(z0[3] - cfg.k) > MOMENTUM_TOL:
        raise ConflictingMomentum(
            f"z0[3] = {z0[3]!r} disagrees with cfg.k = {cfg.k!r}"
        )

    def rhs(y):
        z = y[0:4]
        x = y[4:8]
        u1 = z[0] / cfg.c1
        u2 = z[1] / cfg.c2
        return np.array(
            [
                z[1] * z[2] / cfg.c2,
                -z[0] * z[2] / cfg.c1,
                -z[0] * z[3] / cfg.c1,
                0.0,
                u1,
                u2,
                u1 * x[1],
                u1 * x[2],
                0.5 * (cfg.c1 * u1 * u1 + cfg.c2 * u2 * u2),
            ]
        )

    y0 = np.concatenate([z0, x0, [0.0]])
    if t_end == 0:
        times = np.zeros(1)
        ys = y0[None, :]
    else:
        times, ys = integrate_generic(rhs, y0, t_end, spec, n_out)
    costates = ys[:, 0:4]
    states = ys[:, 4:8]
    controls = np.column_stack([costates[:, 0] / cfg.c1, costates[:, 1] / cfg.c2])
    cost = float(ys[-1, 8])
    residual = 0.0
    if t_end > 0:
        residual = _matrix_equation_residual(cfg, y0, t_end, spec, residual_checks)
    return G4Result(times, states, costates, controls, cost, residual)


def _matrix_equation_residual(cfg, y0, t_end, spec, checks):
    """Max |dX/dt - X (A1 u1 + A2 u2)| via a 4th-order central stencil."""
    A1, A2, _, _ = lie_basis()
    h = 1e-4 * t_end
    t_check = np.linspace(t_end * 0.02, t_end * 0.98, checks)
    t_req = np.sort(
        np.concatenate(
            [t_check - 2 * h, t_check - h, t_check, t_check + h, t_check + 2 * h]
        )
    )

    def rhs(y):
        z = y[0:4]
        x = y[4:8]
        u1 = z[0] / cfg.c1
        u2 = z[1] / cfg.c2
        return np.array(
            [
                z[1] * z[2] / cfg.c2,
                -z[0] * z[2] / cfg.c1,
                -z[0] * z[3] / cfg.c1,
                0.0,
                u1,
                u2,
                u1 * x[1],
                u1 * x[2],
                0.0,
            ]
        )

    _, ys = integrate_generic(rhs, y0, t_end, spec, n_out=None, t_out=t_req)
    worst = 0.0
    for i in range(checks):
        ymm, ym, yc, yp, ypp = ys[5 * i : 5 * i + 5]
        Xdot = (
            embed(ymm[4:8])
            - 8.0 * embed(ym[4:8])
            + 8.0 * embed(yp[4:8])
            - embed(ypp[4:8])
        ) / (12.0 * h)
        u1 = yc[0] / cfg.c1
        u2 = yc[1] / cfg.c2
        alg = embed(yc[4:8]) @ (A1 * u1 + A2 * u2)
        worst = max(worst, float(np.max(np.abs(Xdot - alg))))
    return worst


def classify_g4_equilibrium(cfg: ControlConfig, family: str, m: float = 0.0):
    """Stability report for one costate equilibrium family.

    Families: ``origin`` (0,0,0), ``e2`` (0, m, 0), ``e3`` (0, 0, m). The
    verdict is delegated to the top classification through the parameter
    bridge and the coordinate relabeling: e2 maps to the top's x3-axis
    family (stable iff k*m > 0 here) and e3 to the top's x1-axis family
    (always stable, since b2*b3 = -1/(c1*c2) < 0).
    """
    b = to_mbtop(cfg)
    if family == "origin":
        top_e = Equilibrium("origin")
        point = np.zeros(3)
    elif family == "e2":
        top_e = Equilibrium("e3", m)
        point = np.array([0.0, m, 0.0])
    elif family == "e3":
        top_e = Equilibrium("e1", m)
        point = np.array([0.0, 0.0, m])
    else:
        raise ValueError(f"family must be 'origin', 'e2' or 'e3', got {family!r}")
    rep = nonlinear_classify(b, top_e)
    return EquilibriumReport(
        point,
        family,
        m,
        rep.eigenvalues,
        rep.spectral,
        rep.nonlinear,
        rep.certificate,
        rep.ec_lambda0,
        rep.note,
    )


def classify_g4_equilibria(cfg: ControlConfig, m_values=(1.0, -1.0)):
    """Reports for all three families at the sampled m values."""
    reports = [classify_g4_equilibrium(cfg, "origin")]
    for m in m_values:
        reports.append(classify_g4_equilibrium(cfg, "e2", m))
        reports.append(classify_g4_equilibrium(cfg, "e3", m))
    return reports


def g4_pendulum_accel(cfg: ControlConfig, H: float, theta: float) -> float:
    """theta_ddot of the costate pendulum on the level
    z1^2 + (c1/c2) z2^2 = 2H."""
    if H <= 0:
        raise ValueError("level value H must be positive")
    return (
        cfg.k
        / (cfg.c1 * cfg.c1)
        * math.sqrt(cfg.c1 / cfg.c2)
        * math.sqrt(2.0 * H)
        * math.cos(theta)
    )
