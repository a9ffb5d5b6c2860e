"""Equilibrium families of the top and their stability classification.

The equilibria are the origin, the x1-axis family (m, 0, 0), and the
x3-axis family (0, 0, m), m != 0. Spectral verdicts come from closed-form
eigenvalues of the linearization (cross-checkable against a numeric
eigensolver); nonlinear verdicts come from three certificates:

* a quartic Lyapunov function for the x1-axis family when b2*b3 < 0,
* an energy-Casimir certificate H - lambda0*C for the x3-axis family
  when m*b1*b2 < 0,
* a semidefinite Lyapunov candidate (H0^2) at the origin. That candidate
  vanishes on the whole x1-axis, so it is not definite; when b2*b3 < 0
  definiteness is recovered by combining it with the Casimir constraint,
  otherwise the verdict is downgraded to ``claimed_stable`` and the
  perturbation probe supplies empirical evidence only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import Params, as_state, vector_field
from .errors import MissingMultiplier, NumericalError
from .integrate import IntegratorSpec, integrate

__all__ = [
    "Equilibrium",
    "EquilibriumReport",
    "ProbeResult",
    "equilibria",
    "is_equilibrium",
    "linearization",
    "spectral_classify",
    "numeric_eigenvalues",
    "lyapunov_value",
    "ec_multiplier",
    "ec_gradient",
    "ec_restricted_hessian",
    "nonlinear_classify",
    "perturbation_probe",
]

FAMILIES = ("origin", "e1", "e3")

ESCAPE_FACTOR = 100.0
WARN_FACTOR = 10.0


@dataclass(frozen=True)
class Equilibrium:
    """One member of an equilibrium family; m parametrizes the axis ones."""

    family: str
    m: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.family == "origin" and self.m != 0.0:
            raise ValueError("origin has m = 0")
        if self.family in ("e1", "e3") and self.m == 0.0:
            raise ValueError(f"family {self.family!r} requires m != 0")

    def point(self) -> np.ndarray:
        if self.family == "origin":
            return np.zeros(3)
        if self.family == "e1":
            return np.array([self.m, 0.0, 0.0])
        return np.array([0.0, 0.0, self.m])


@dataclass(frozen=True)
class EquilibriumReport:
    point: np.ndarray
    family: str
    m: float
    eigenvalues: tuple
    spectral: str  # "stable" | "unstable"
    nonlinear: str  # "stable" | "unstable" | "claimed_stable" | "inconclusive"
    certificate: str
    ec_lambda0: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.spectral == "unstable" and self.nonlinear != "unstable":
            raise ValueError("spectrally unstable implies nonlinearly unstable")
        if not self.certificate:
            raise ValueError("certificate must be nonempty")


def equilibria(b: Params) -> dict:
    """Describe the three parametric equilibrium families."""
    return {
        "origin": {"point": "(0, 0, 0)"},
        "e1": {"point": "(m, 0, 0), m != 0"},
        "e3": {"point": "(0, 0, m), m != 0"},
    }


def is_equilibrium(b: Params, x, tol: float = 0.0) -> bool:
    """Whether the field vanishes at x (x2 = 0 and x1*x3 = 0)."""
    return bool(np.max(np.abs(vector_field(b, as_state(x)))) <= tol)


def linearization(b: Params, x) -> np.ndarray:
    """Jacobian of the field at x."""
    x1, x2, x3 = as_state(x)
    return np.array(
        [
            [0.0, b.b1, 0.0],
            [b.b2 * x3, 0.0, b.b2 * x1],
            [b.b3 * x2, b.b3 * x1, 0.0],
        ]
    )


def spectral_classify(b: Params, e: Equilibrium):
    """Closed-form eigenvalues and spectral verdict.

    e1: {0, +-m*sqrt(b2*b3)}, stable iff b2*b3 < 0 (imaginary pair);
    e3: {0, +-sqrt(m*b1*b2)}, stable iff m*b1*b2 < 0;
    origin: triple zero (nilpotent linearization), stable.
    """
    if e.family == "origin":
        return (0j, 0j, 0j), "stable"
    if e.family == "e1":
        root = e.m * cmath.sqrt(complex(b.b2 * b.b3))
        stable = b.b2 * b.b3 < 0
    else:
        root = cmath.sqrt(complex(e.m * b.b1 * b.b2))
        stable = e.m * b.b1 * b.b2 < 0
    return (0j, root, -root), "stable" if stable else "unstable"


def numeric_eigenvalues(b: Params, e: Equilibrium) -> np.ndarray:
    """Eigenvalues of the linearization from a generic dense eigensolver."""
    return np.linalg.eigvals(linearization(b, e.point()))


def lyapunov_value(kind: str, b: Params, m: float = 0.0, lam=None, x=None) -> float:
    """Evaluate one of the three certificate functions at x.

    ``L_e1``: 0.5*(-(b3/2b1) x1^2 + x3 + (b3/2b1) m^2)^2
              + 0.5*(x2^2 - (b2/b3) x3^2)           (needs m != 0)
    ``L0_origin``: 0.25*(x2^2 - (b2/b3) x3^2)^2
    ``F_ec``: H - lam*C                             (needs lam)
    """
    x1, x2, x3 = as_state(x)
    q = x2 * x2 - (b.b2 / b.b3) * x3 * x3
    if kind == "L_e1":
        if m == 0.0:
            raise ValueError("L_e1 requires m != 0")
        r = b.b3 / (2.0 * b.b1)
        return 0.5 * (-r * x1 * x1 + x3 + r * m * m) ** 2 + 0.5 * q
    if kind == "L0_origin":
        return 0.25 * q * q
    if kind == "F_ec":
        if lam is None:
            raise MissingMultiplier("F_ec requires the multiplier lambda")
        h = 0.5 * b.b1 * q
        c = -(b.b3 / (2.0 * b.b1)) * x1 * x1 + x3
        return h - lam * c
    raise ValueError(f"unknown kind {kind!r}")


def ec_multiplier(b: Params, m: float) -> float:
    """The multiplier lambda0 = -m*b1*b2/b3 that makes grad(H - lam*C) vanish at (0,0,m)."""
    return -m * b.b1 * b.b2 / b.b3


def ec_gradient(b: Params, m: float, lam: float, x) -> np.ndarray:
    """Closed-form gradient of H - lam*C at x."""
    x1, x2, x3 = as_state(x)
    return np.array(
        [
            lam * (b.b3 / b.b1) * x1,
            b.b1 * x2,
            -(b.b1 * b.b2 / b.b3) * x3 - lam,
        ]
    )


def ec_restricted_hessian(b: Params, m: float):
    """Hessian of H - lambda0*C restricted to W = ker dC at (0,0,m).

    W is spanned by the first two coordinate directions; the restricted
    quadratic form is diagonal with values (-m*b2, b1). Returns the
    diagonal and a definiteness verdict.
    """
    if m == 0.0:
        raise ValueError("m must be nonzero")
    d = (-m * b.b2, b.b1)
    if d[0] > 0 and d[1] > 0:
        verdict = "positive-definite"
    elif d[0] < 0 and d[1] < 0:
        verdict = "negative-definite"
    else:
        verdict = "indefinite"
    return d, verdict


def nonlinear_classify(b: Params, e: Equilibrium) -> EquilibriumReport:
    """Full report combining spectral and nonlinear verdicts."""
    eigs, spectral = spectral_classify(b, e)
    lam0 = None
    note = ""
    if e.family == "e1":
        if b.b2 * b.b3 < 0:
            nonlinear = "stable"
            cert = "quartic Lyapunov function centered on the x1-axis point"
        else:
            nonlinear = "unstable"
            cert = "real eigenvalue pair of the linearization"
    elif e.family == "e3":
        lam0 = ec_multiplier(b, e.m)
        if e.m * b.b1 * b.b2 < 0:
            nonlinear = "stable"
            cert = (
                "energy-Casimir certificate: restricted Hessian of "
                f"H - lambda0*C definite (lambda0 = {lam0:g})"
            )
        else:
            nonlinear = "unstable"
            cert = "real eigenvalue pair of the linearization"
    else:  # origin
        note = (
            "linearization is nilpotent (single 2x2 Jordan block at 0); "
            "spectral stability rests on zero real parts only"
        )
        if b.b2 * b.b3 < 0:
            nonlinear = "stable"
            cert = (
                "semidefinite Lyapunov candidate (H0^2) made definite by "
                "the Casimir constraint x1^2 = (2*b1/b3)*(x3 - C)"
            )
        else:
            # The candidate H0^2 vanishes on the whole x1-axis, so it is
            # only semidefinite and the certificate does not close.
            nonlinear = "claimed_stable"
            cert = (
                "semidefinite Lyapunov candidate (H0^2); definiteness "
                "fails on the x1-axis, probe evidence only"
            )
    return EquilibriumReport(
        e.point(), e.family, e.m, eigs, spectral, nonlinear, cert, lam0, note
    )


@dataclass(frozen=True)
class ProbeResult:
    max_excursion: float
    escaped: bool
    eps: float
    warning: bool  # excursion between 10*eps and 100*eps


def perturbation_probe(
    b: Params,
    e: Equilibrium,
    eps: float,
    t_end: float,
    n_directions: int = 8,
    rng_seed: int = 42,
    spec: IntegratorSpec | None = None,
    n_out: int = 201,
) -> ProbeResult:
    """Empirical stability cross-check.

    Integrates from ``n_directions`` seeded random points at distance eps
    from the equilibrium and reports the largest distance reached;
    ``escaped`` means the excursion exceeded 100*eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    spec = spec or IntegratorSpec(method="rk45_adaptive", rtol=1e-8, atol=1e-10)
    rng = np.random.default_rng(rng_seed)
    center = e.point()
    worst = 0.0
    for _ in range(n_directions):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        try:
            traj = integrate(b, center + eps * d, t_end, spec, n_out)
        except NumericalError:
            # finite-time blow-up: the strongest possible escape evidence
            worst = math.inf
            break
        dist = np.max(np.linalg.norm(traj.states - center, axis=1))
        worst = max(worst, float(dist))
    return ProbeResult(
        worst,
        worst > ESCAPE_FACTOR * eps,
        eps,
        WARN_FACTOR * eps < worst <= ESCAPE_FACTOR * eps,
    )
