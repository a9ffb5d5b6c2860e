"""Trivariate polynomial arithmetic and Poisson-axiom verification.

Brackets induced by a skew-symmetric matrix with polynomial entries map
polynomials to polynomials, so skew-symmetry, the Jacobi identity, the
Leibniz rule, and the Casimir property can all be checked coefficientwise
instead of at sample points. Polynomial test functions of degree <= 2 are
decisive here because all matrix entries are affine in x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Params, Realization, RealizationBundle, vector_field
from .errors import DegreeOverflow

__all__ = [
    "Poly3",
    "PolyPoissonMatrix",
    "poly_H",
    "poly_C",
    "poly_H0",
    "poly_mixed",
    "poly_field",
    "poisson_poly",
    "named_poisson_poly",
    "bracket",
    "jacobi_residual",
    "casimir_residual",
    "leibniz_residual",
    "hamiltonian_form_residual",
]

DEFAULT_MAX_DEGREE = 8


@dataclass(frozen=True)
class Poly3:
    """Dense-degree-bounded polynomial in (x1, x2, x3).

    Coefficients are stored sparsely as a map from exponent triples to
    floats; exact-zero coefficients are dropped. Any arithmetic result
    whose true degree would exceed ``max_degree`` raises
    :class:`DegreeOverflow` rather than silently truncating.
    """

    coeffs: dict = field(default_factory=dict)
    max_degree: int = DEFAULT_MAX_DEGREE

    def __post_init__(self):
        clean = {}
        for exps, c in self.coeffs.items():
            i, j, k = exps
            if i + j + k > self.max_degree and c != 0.0:
                raise DegreeOverflow(
                    f"term x1^{i} x2^{j} x3^{k} exceeds degree budget {self.max_degree}"
                )
            if c != 0.0:
                clean[(int(i), int(j), int(k))] = float(c)
        object.__setattr__(self, "coeffs", clean)

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, max_degree=DEFAULT_MAX_DEGREE):
        return cls({}, max_degree)

    @classmethod
    def const(cls, c, max_degree=DEFAULT_MAX_DEGREE):
        return cls({(0, 0, 0): float(c)}, max_degree)

    @classmethod
    def var(cls, i, max_degree=DEFAULT_MAX_DEGREE):
        """The coordinate monomial x_i, i in {1, 2, 3}."""
        if i not in (1, 2, 3):
            raise ValueError("variable index must be 1, 2 or 3")
        e = [0, 0, 0]
        e[i - 1] = 1
        return cls({tuple(e): 1.0}, max_degree)

    # -- arithmetic --------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0.0) + c
        return Poly3(out, self.max_degree)

    __radd__ = __add__

    def __neg__(self):
        return Poly3({e: -c for e, c in self.coeffs.items()}, self.max_degree)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for (i1, j1, k1), c1 in self.coeffs.items():
            for (i2, j2, k2), c2 in other.coeffs.items():
                e = (i1 + i2, j1 + j2, k1 + k2)
                out[e] = out.get(e, 0.0) + c1 * c2
        return Poly3(out, self.max_degree)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, Poly3):
            return other
        return Poly3.const(other, self.max_degree)

    # -- calculus & queries -------------------------------------------

    def diff(self, i):
        """Partial derivative with respect to x_i."""
        out = {}
        for e, c in self.coeffs.items():
            n = e[i - 1]
            if n > 0:
                ne = list(e)
                ne[i - 1] = n - 1
                out[tuple(ne)] = out.get(tuple(ne), 0.0) + n * c
        return Poly3(out, self.max_degree)

    def __call__(self, x):
        x1, x2, x3 = x
        return sum(c * x1**i * x2**j * x3**k for (i, j, k), c in self.coeffs.items())

    def max_abs(self):
        """Largest coefficient magnitude (0 for the zero polynomial)."""
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def is_zero(self, tol=0.0):
        return self.max_abs() <= tol

    def degree(self):
        return max((sum(e) for e in self.coeffs), default=0)


@dataclass(frozen=True)
class PolyPoissonMatrix:
    """3x3 skew-symmetric matrix of polynomials, stored as its upper triangle.

    Skew-symmetry is structural: only entries (1,2), (1,3), (2,3) are kept
    and the lower triangle is produced by negation.
    """

    p12: Poly3
    p13: Poly3
    p23: Poly3

    def entry(self, i, j):
        if i == j:
            return Poly3.zero(self.p12.max_degree)
        key = (min(i, j), max(i, j))
        p = {(1, 2): self.p12, (1, 3): self.p13, (2, 3): self.p23}[key]
        return p if i < j else -p

    def with_entry(self, i, j, p: Poly3) -> "PolyPoissonMatrix":
        """Copy with one upper-triangle entry replaced (negative controls)."""
        parts = {"p12": self.p12, "p13": self.p13, "p23": self.p23}
        key = f"p{min(i, j)}{max(i, j)}"
        parts[key] = p if i < j else -p
        return PolyPoissonMatrix(**parts)

    def evaluate(self, x) -> np.ndarray:
        m = np.zeros((3, 3))
        for i in range(1, 4):
            for j in range(1, 4):
                m[i - 1, j - 1] = self.entry(i, j)(x)
        return m


# -- the family's integrals and matrices in polynomial form -----------


def poly_H(b: Params, max_degree=DEFAULT_MAX_DEGREE) -> Poly3:
    return Poly3(
        {(0, 2, 0): b.b1 / 2.0, (0, 0, 2): -b.b1 * b.b2 / (2.0 * b.b3)}, max_degree
    )


def poly_C(b: Params, max_degree=DEFAULT_MAX_DEGREE) -> Poly3:
    return Poly3({(2, 0, 0): -b.b3 / (2.0 * b.b1), (0, 0, 1): 1.0}, max_degree)


def poly_H0(b: Params, max_degree=DEFAULT_MAX_DEGREE) -> Poly3:
    return Poly3({(0, 2, 0): 0.5, (0, 0, 2): -b.b2 / (2.0 * b.b3)}, max_degree)


def poly_mixed(b: Params, c_coef, h_coef, max_degree=DEFAULT_MAX_DEGREE) -> Poly3:
    """c_coef*C + h_coef*H as a polynomial."""
    return c_coef * poly_C(b, max_degree) + h_coef * poly_H(b, max_degree)


def poly_field(b: Params, max_degree=DEFAULT_MAX_DEGREE):
    """The vector field as a triple of polynomials."""
    return (
        Poly3({(0, 1, 0): b.b1}, max_degree),
        Poly3({(1, 0, 1): b.b2}, max_degree),
        Poly3({(1, 1, 0): b.b3}, max_degree),
    )


def poisson_poly(
    b: Params, alpha=1.0, beta=0.0, max_degree=DEFAULT_MAX_DEGREE
) -> PolyPoissonMatrix:
    """Poisson matrix of the (alpha, beta) mixing in polynomial form.

    alpha=1, beta=0 gives the base matrix; alpha=0, beta=-1 gives the
    swapped ("bar") matrix.
    """
    p12 = Poly3(
        {(0, 0, 0): alpha, (0, 0, 1): -beta * b.b1 * b.b2 / b.b3}, max_degree
    )
    p13 = Poly3({(0, 1, 0): -beta * b.b1}, max_degree)
    p23 = Poly3({(1, 0, 0): -alpha * b.b3 / b.b1}, max_degree)
    return PolyPoissonMatrix(p12, p13, p23)


def named_poisson_poly(b: Params, which: str, max_degree=DEFAULT_MAX_DEGREE):
    if which == "base":
        return poisson_poly(b, 1.0, 0.0, max_degree)
    if which == "bar":
        return poisson_poly(b, 0.0, -1.0, max_degree)
    raise ValueError(f"which must be 'base' or 'bar', got {which!r}")


# -- bracket machinery -------------------------------------------------


def bracket(P: PolyPoissonMatrix, f: Poly3, g: Poly3) -> Poly3:
    """{f, g} = sum_ij (df/dxi) P_ij (dg/dxj), exactly in coefficients."""
    df = [f.diff(i) for i in (1, 2, 3)]
    dg = [g.diff(j) for j in (1, 2, 3)]
    out = Poly3.zero(f.max_degree)
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            out = out + df[i] * P.entry(i + 1, j + 1) * dg[j]
    return out


def jacobi_residual(P: PolyPoissonMatrix, f: Poly3, g: Poly3, h: Poly3) -> float:
    """Max-abs coefficient of {f,{g,h}} + {g,{h,f}} + {h,{f,g}}."""
    s = (
        bracket(P, f, bracket(P, g, h))
        + bracket(P, g, bracket(P, h, f))
        + bracket(P, h, bracket(P, f, g))
    )
    return s.max_abs()


def casimir_residual(P: PolyPoissonMatrix, C: Poly3, probes) -> float:
    """Max over probes f of the max-abs coefficient of {C, f}."""
    return max((bracket(P, C, f).max_abs() for f in probes), default=0.0)


def leibniz_residual(P: PolyPoissonMatrix, f: Poly3, g: Poly3, h: Poly3) -> float:
    """Max-abs coefficient of {f*g, h} - f*{g, h} - g*{f, h}."""
    r = bracket(P, f * g, h) - f * bracket(P, g, h) - g * bracket(P, f, h)
    return r.max_abs()


def hamiltonian_form_residual(
    b: Params, bundle: RealizationBundle, samples: int, rng_seed: int
) -> float:
    """Numeric check that P(x) @ grad(H)(x) reproduces the vector field.

    Samples x uniformly in [-5, 5]^3 with a seeded generator and returns
    the max infinity-norm discrepancy.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(samples):
        x = rng.uniform(-5.0, 5.0, size=3)
        resid = bundle.poisson_matrix(x) @ bundle.hamiltonian_grad(x) - vector_field(
            b, x
        )
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


def coordinate_probes(max_degree=DEFAULT_MAX_DEGREE):
    """The standard probe basis {x1, x2, x3, x1^2, x2*x3}."""
    v1, v2, v3 = (Poly3.var(i, max_degree) for i in (1, 2, 3))
    return [v1, v2, v3, v1 * v1, v2 * v3]


def random_poly(rng, degree=2, max_degree=DEFAULT_MAX_DEGREE) -> Poly3:
    """Random polynomial with coefficients in [-1, 1] up to given degree."""
    coeffs = {}
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            for k in range(degree + 1 - i - j):
                coeffs[(i, j, k)] = rng.uniform(-1.0, 1.0)
    return Poly3(coeffs, max_degree)


def random_unimodular(rng) -> Realization:
    """Random unit-determinant coefficients via LU-style factors."""
    a = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
    u = rng.uniform(-2.0, 2.0)
    l = rng.uniform(-2.0, 2.0)
    # [[1,0],[l,1]] @ [[a,u],[0,1/a]] has determinant 1
    return Realization(a, u, l * a, l * u + 1.0 / a)
