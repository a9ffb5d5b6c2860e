"""Core definitions of the Maxwell-Bloch top family.

The family is the three-parameter cubic system on R^3

    dx1/dt = b1*x2,   dx2/dt = b2*x1*x3,   dx3/dt = b3*x1*x2,

with b1*b2*b3 != 0. This module provides the parameter/state containers,
the vector field, the two classical first integrals H and C (plus the
rescaled H0 = H/b1), and the full family of Hamilton-Poisson realizations
parametrized by unit-determinant coefficient matrices.

All gradients are coded in closed form (the integrals are quadratics), so
structure checks downstream carry no finite-difference tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateParams, NotUnimodular, UnknownPreset

__all__ = [
    "Params",
    "Realization",
    "RealizationBundle",
    "make_params",
    "preset",
    "PRESETS",
    "as_state",
    "vector_field",
    "first_integrals",
    "grad_H",
    "grad_C",
    "poisson_matrix",
    "realization",
    "named_realization",
]

#: determinant slack accepted for realization coefficients
UNIMODULAR_TOL = 1e-12

#: below this magnitude a parameter is considered ill-conditioned (CLI warns)
ILL_CONDITIONED = 1e-9


@dataclass(frozen=True)
class Params:
    """Parameter triple (b1, b2, b3) selecting a member of the family."""

    b1: float
    b2: float
    b3: float

    def __post_init__(self):
        for name in ("b1", "b2", "b3"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DegenerateParams(f"{name} must be finite, got {v!r}")
            if v == 0.0:
                raise DegenerateParams(f"{name} must be nonzero")

    def as_tuple(self):
        return (self.b1, self.b2, self.b3)


def make_params(b1: float, b2: float, b3: float) -> Params:
    """Validated constructor; rejects any zero component."""
    return Params(float(b1), float(b2), float(b3))


PRESETS = {
    "maxwell_bloch": (1.0, 1.0, -1.0),
    "lorenz_hamilton": (0.5, -1.0, 1.0),
}


def preset(name: str) -> Params:
    """Return the parameter triple of a named family member.

    Known presets: ``maxwell_bloch`` -> (1, 1, -1) and ``lorenz_hamilton``
    -> (1/2, -1, 1). Hyphens are accepted in place of underscores.
    """
    key = name.strip().lower().replace("-", "_")
    try:
        return Params(*PRESETS[key])
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise UnknownPreset(f"unknown preset {name!r} (known: {known})") from None


def as_state(x) -> np.ndarray:
    """Coerce to a finite length-3 float array."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"state must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state components must be finite")
    return arr


def vector_field(b: Params, x) -> np.ndarray:
    """Right-hand side (b1*x2, b2*x1*x3, b3*x1*x2)."""
    x1, x2, x3 = x
    return np.array([b.b1 * x2, b.b2 * x1 * x3, b.b3 * x1 * x2])


def first_integrals(b: Params, x) -> tuple[float, float, float]:
    """Return (H, C, H0) at x.

    H  = (b1/2) * (x2^2 - (b2/b3) x3^2)
    C  = -(b3/(2 b1)) x1^2 + x3
    H0 = H / b1
    """
    x1, x2, x3 = x
    h0 = 0.5 * (x2 * x2 - (b.b2 / b.b3) * x3 * x3)
    h = b.b1 * h0
    c = -(b.b3 / (2.0 * b.b1)) * x1 * x1 + x3
    return h, c, h0


def grad_H(b: Params, x) -> np.ndarray:
    x1, x2, x3 = x
    return np.array([0.0, b.b1 * x2, -(b.b1 * b.b2 / b.b3) * x3])


def grad_C(b: Params, x) -> np.ndarray:
    x1, x2, x3 = x
    return np.array([-(b.b3 / b.b1) * x1, 0.0, 1.0])


def poisson_matrix(b: Params, x) -> np.ndarray:
    """The base Poisson matrix: f(x) = P(x) @ grad_H(x)."""
    x1 = x[0]
    w = (b.b3 / b.b1) * x1
    return np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, -w], [0.0, w, 0.0]])


@dataclass(frozen=True)
class Realization:
    """Coefficients (alpha, beta, gamma, delta) with unit determinant.

    They mix the two first integrals into a new Casimir alpha*C + beta*H
    and Hamiltonian gamma*C + delta*H; the Poisson matrix is adjusted so
    the induced flow is unchanged.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        det = self.alpha * self.delta - self.beta * self.gamma
        if not math.isfinite(det) or abs(det - 1.0) > UNIMODULAR_TOL:
            raise NotUnimodular(
                f"alpha*delta - beta*gamma = {det!r}, must equal 1 "
                f"to within {UNIMODULAR_TOL}"
            )


@dataclass(frozen=True)
class RealizationBundle:
    """A Hamilton-Poisson realization as evaluable closures.

    Matrices and scalars are recomputed from the state on every call
    (entries are affine/quadratic in x, so this is cheap and cannot go
    stale).
    """

    poisson_matrix: Callable[[np.ndarray], np.ndarray]
    hamiltonian: Callable[[np.ndarray], float]
    casimir: Callable[[np.ndarray], float]
    hamiltonian_grad: Callable[[np.ndarray], np.ndarray]
    casimir_grad: Callable[[np.ndarray], np.ndarray]
    label: str


def _mixed_integral(b: Params, c_coef: float, h_coef: float):
    """Closure for c_coef*C + h_coef*H and its gradient."""

    def value(x) -> float:
        h, c, _ = first_integrals(b, x)
        return c_coef * c + h_coef * h

    def grad(x) -> np.ndarray:
        return c_coef * grad_C(b, x) + h_coef * grad_H(b, x)

    return value, grad


def realization(b: Params, r: Realization) -> RealizationBundle:
    """Hamilton-Poisson realization for general unimodular coefficients.

    Hamiltonian gamma*C + delta*H, Casimir alpha*C + beta*H, and the
    matching Poisson matrix with rows built from alpha and beta. With
    (1, 0, 0, 1) this reduces to the base realization.
    """
    a, bb = r.alpha, r.beta
    k12 = bb * b.b1 * b.b2 / b.b3  # coefficient of x3 in entry (1,2)
    k13 = bb * b.b1               # coefficient of x2 in entry (1,3)
    k23 = a * b.b3 / b.b1         # coefficient of x1 in entry (2,3)

    def pmat(x) -> np.ndarray:
        x1, x2, x3 = x
        p12 = a - k12 * x3
        p13 = -k13 * x2
        p23 = -k23 * x1
        return np.array(
            [[0.0, p12, p13], [-p12, 0.0, p23], [-p13, -p23, 0.0]]
        )

    ham, ham_grad = _mixed_integral(b, r.gamma, r.delta)
    cas, cas_grad = _mixed_integral(b, r.alpha, r.beta)
    label = f"sl2(alpha={r.alpha:g}, beta={r.beta:g}, gamma={r.gamma:g}, delta={r.delta:g})"
    return RealizationBundle(pmat, ham, cas, ham_grad, cas_grad, label)


def named_realization(b: Params, which: str) -> RealizationBundle:
    """One of the two distinguished realizations.

    ``base``: Poisson matrix P with constant entry P[0][1] = 1, Hamiltonian
    H, Casimir C.

    ``bar``: the swapped realization with Hamiltonian C and Casimir H (the
    Casimir is reported with the positive sign; the Casimir property is
    sign-invariant). Its matrix has first row (0, (b1*b2/b3)*x3, b1*x2).
    """
    if which == "base":
        bundle = realization(b, Realization(1.0, 0.0, 0.0, 1.0))
        return RealizationBundle(
            bundle.poisson_matrix,
            bundle.hamiltonian,
            bundle.casimir,
            bundle.hamiltonian_grad,
            bundle.casimir_grad,
            "base",
        )
    if which == "bar":
        swapped = realization(b, Realization(0.0, -1.0, 1.0, 0.0))

        def cas(x) -> float:
            return -swapped.casimir(x)  # = H(x), the printed convention

        def cas_grad(x) -> np.ndarray:
            return -swapped.casimir_grad(x)

        return RealizationBundle(
            swapped.poisson_matrix,
            swapped.hamiltonian,
            cas,
            swapped.hamiltonian_grad,
            cas_grad,
            "bar",
        )
    raise ValueError(f"which must be 'base' or 'bar', got {which!r}")
