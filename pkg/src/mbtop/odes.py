"""Pure-Python ODE steppers with dense output.

Three methods are provided, each generic over a right-hand-side callable:

* classic fixed-step RK4,
* an adaptive Dormand-Prince 5(4) embedded pair with PI step control,
* the implicit midpoint rule (fixed-point iteration with a Newton
  fallback), which conserves quadratic first integrals exactly up to the
  stage-equation tolerance.

Requested output times are filled by cubic Hermite interpolation on
accepted steps. The compiled extension in ``mbtop._fastpath`` reimplements
the same algorithms (identical coefficients) for the hot top-system loop;
this module is the reference implementation and the fallback.
"""

from __future__ import annotations

import numpy as np

from .errors import NewtonDivergence, StepFailure

__all__ = ["rk4_fixed", "dopri45", "implicit_midpoint"]

# Dormand-Prince 5(4): 7 stages, FSAL.
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
DP_E = DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_ALPHA = 0.7 / 5.0
PI_BETA = 0.4 / 5.0


def _hermite(t, t0, t1, y0, y1, f0, f1):
    """Cubic Hermite value at t on the step [t0, t1]."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


class _DenseFiller:
    """Emits interpolated values at sorted output times as steps complete."""

    def __init__(self, t_out, x0, f0):
        self.t_out = np.asarray(t_out, dtype=float)
        self.out = np.empty((len(self.t_out), len(x0)))
        self.idx = 0
        while self.idx < len(self.t_out) and self.t_out[self.idx] <= 0.0:
            self.out[self.idx] = x0
            self.idx += 1

    def advance(self, t0, t1, y0, y1, f0, f1):
        while self.idx < len(self.t_out) and self.t_out[self.idx] <= t1 + 1e-15 * max(
            1.0, abs(t1)
        ):
            t = min(self.t_out[self.idx], t1)
            self.out[self.idx] = _hermite(t, t0, t1, y0, y1, f0, f1)
            self.idx += 1

    def finish(self, t_end, y_end):
        while self.idx < len(self.t_out):
            self.out[self.idx] = y_end
            self.idx += 1
        return self.out


def rk4_fixed(f, x0, t_end, h, t_out):
    """Classic RK4 with fixed step h; the final step is shortened."""
    x0 = np.asarray(x0, dtype=float)
    filler = _DenseFiller(t_out, x0, f(x0))
    t, y = 0.0, x0.copy()
    fy = f(y)
    while t < t_end - 1e-14 * max(1.0, t_end):
        step = min(h, t_end - t)
        k1 = fy
        k2 = f(y + 0.5 * step * k1)
        k3 = f(y + 0.5 * step * k2)
        k4 = f(y + step * k3)
        y1 = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f1 = f(y1)
        filler.advance(t, t + step, y, y1, k1, f1)
        t += step
        y, fy = y1, f1
    return filler.finish(t_end, y)


def dopri45(f, x0, t_end, rtol, atol, t_out, h0=None):
    """Dormand-Prince 5(4) with PI step-size control.

    Raises :class:`StepFailure` when the step underflows 1e-12 * t_end.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    k = np.empty((7, n))
    k[0] = f(x0)
    filler = _DenseFiller(t_out, x0, k[0])
    t, y = 0.0, x0.copy()
    h = h0 if h0 is not None else 1e-3 * t_end
    h_min = 1e-12 * t_end
    err_prev = 1.0
    while t < t_end - 1e-14 * max(1.0, t_end):
        h = min(h, t_end - t)
        if h < h_min:
            raise StepFailure(f"step size underflow at t={t!r} (h={h!r})")
        for i in range(1, 7):
            yi = y + h * sum(DP_A[i][j] * k[j] for j in range(i))
            k[i] = f(yi)
        y1 = y + h * (DP_B5 @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y1))
        err = np.sqrt(np.mean((h * (DP_E @ k) / scale) ** 2))
        if err <= 1.0:
            filler.advance(t, t + h, y, y1, k[0], k[6])
            t += h
            y = y1
            k[0] = k[6]  # FSAL
            fac = SAFETY * err ** -PI_ALPHA * err_prev**PI_BETA if err > 0 else FAC_MAX
            err_prev = max(err, 1e-10)
        else:
            fac = SAFETY * err**-PI_ALPHA
        h *= min(FAC_MAX, max(FAC_MIN, fac))
    return filler.finish(t_end, y)


def implicit_midpoint(f, x0, t_end, h, t_out, newton_tol, max_iters, jac=None):
    """Implicit midpoint rule: y1 = y0 + h f((y0+y1)/2).

    The stage equation is solved by fixed-point iteration; if that stalls,
    Newton iteration takes over (Jacobian supplied or by forward
    differences). Raises :class:`NewtonDivergence` on failure.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    eye = np.eye(n)
    filler = _DenseFiller(t_out, x0, f(x0))
    t, y = 0.0, x0.copy()
    fy = f(y)
    while t < t_end - 1e-14 * max(1.0, t_end):
        step = min(h, t_end - t)
        y1 = y + step * fy  # explicit Euler predictor
        converged = False
        for _ in range(max_iters):
            mid = 0.5 * (y + y1)
            g = y1 - y - step * f(mid)
            if np.max(np.abs(g)) <= newton_tol:
                converged = True
                break
            y1 = y1 - g
        if not converged:
            for _ in range(max_iters):
                mid = 0.5 * (y + y1)
                g = y1 - y - step * f(mid)
                if np.max(np.abs(g)) <= newton_tol:
                    converged = True
                    break
                J = jac(mid) if jac is not None else _fd_jacobian(f, mid)
                try:
                    dy = np.linalg.solve(eye - 0.5 * step * J, g)
                except np.linalg.LinAlgError as exc:
                    raise NewtonDivergence(f"singular Newton system at t={t!r}") from exc
                y1 = y1 - dy
        if not converged:
            raise NewtonDivergence(
                f"midpoint stage equation did not reach {newton_tol} at t={t!r}"
            )
        f1 = f(y1)
        filler.advance(t, t + step, y, y1, fy, f1)
        t += step
        y, fy = y1, f1
    return filler.finish(t_end, y)


def _fd_jacobian(f, x, eps=1e-7):
    n = len(x)
    J = np.empty((n, n))
    fx = f(x)
    for j in range(n):
        xp = x.copy()
        xp[j] += eps * max(1.0, abs(x[j]))
        J[:, j] = (f(xp) - fx) / (xp[j] - x[j])
    return J
