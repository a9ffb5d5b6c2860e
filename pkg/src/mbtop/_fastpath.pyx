# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled steppers for the top-system right-hand side.

Same algorithms and Butcher coefficients as ``mbtop.odes``, specialized to
the 3-dimensional cubic field (b1*x2, b2*x1*x3, b3*x1*x2) so the inner
loop carries no Python-call overhead. Selected automatically at import by
``mbtop.integrate`` when available.
"""

from libc.math cimport fabs, sqrt, fmin, fmax

import numpy as np

from .errors import NewtonDivergence, StepFailure

BACKEND = "compiled"

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0
cdef double PI_ALPHA = 0.7 / 5.0
cdef double PI_BETA = 0.4 / 5.0


cdef inline void _rhs(double b1, double b2, double b3,
                      double* y, double* out) nogil:
    out[0] = b1 * y[1]
    out[1] = b2 * y[0] * y[2]
    out[2] = b3 * y[0] * y[1]


cdef inline void _hermite(double t, double t0, double t1,
                          double* y0, double* y1,
                          double* f0, double* f1, double* out) nogil:
    cdef double h = t1 - t0
    cdef double s = (t - t0) / h
    cdef double h00 = (1 + 2 * s) * (1 - s) * (1 - s)
    cdef double h10 = s * (1 - s) * (1 - s)
    cdef double h01 = s * s * (3 - 2 * s)
    cdef double h11 = s * s * (s - 1)
    cdef int i
    for i in range(3):
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]


cdef int _fill(double[:, ::1] out, double[::1] t_out, Py_ssize_t idx,
               double t0, double t1,
               double* y0, double* y1, double* f0, double* f1) nogil:
    cdef double tol = 1e-15 * fmax(1.0, fabs(t1))
    cdef double t
    cdef double tmp[3]
    cdef int i
    while idx < t_out.shape[0] and t_out[idx] <= t1 + tol:
        t = fmin(t_out[idx], t1)
        _hermite(t, t0, t1, y0, y1, f0, f1, tmp)
        for i in range(3):
            out[idx, i] = tmp[i]
        idx += 1
    return idx


def rk4_top(double b1, double b2, double b3, x0, double t_end,
            double h, t_out):
    """Fixed-step RK4 for the top system, Hermite-sampled at t_out."""
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef double[:, ::1] out = np.empty((tv.shape[0], 3))
    cdef double y[3]
    cdef double y1[3]
    cdef double fy[3]
    cdef double f1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double tmp[3]
    cdef double t = 0.0, step
    cdef Py_ssize_t idx = 0
    cdef int i
    y[0], y[1], y[2] = x0[0], x0[1], x0[2]
    _rhs(b1, b2, b3, y, fy)
    while idx < tv.shape[0] and tv[idx] <= 0.0:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    while t < t_end - 1e-14 * fmax(1.0, t_end):
        step = fmin(h, t_end - t)
        for i in range(3):
            tmp[i] = y[i] + 0.5 * step * fy[i]
        _rhs(b1, b2, b3, tmp, k2)
        for i in range(3):
            tmp[i] = y[i] + 0.5 * step * k2[i]
        _rhs(b1, b2, b3, tmp, k3)
        for i in range(3):
            tmp[i] = y[i] + step * k3[i]
        _rhs(b1, b2, b3, tmp, k4)
        for i in range(3):
            y1[i] = y[i] + (step / 6.0) * (fy[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        _rhs(b1, b2, b3, y1, f1)
        idx = _fill(out, tv, idx, t, t + step, y, y1, fy, f1)
        t += step
        for i in range(3):
            y[i] = y1[i]
            fy[i] = f1[i]
    while idx < tv.shape[0]:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    return np.asarray(out)


# Dormand-Prince 5(4) tableau (same values as mbtop.odes).
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = B1 - 5179.0 / 57600.0
cdef double E3 = B3 - 7571.0 / 16695.0
cdef double E4 = B4 - 393.0 / 640.0
cdef double E5 = B5 + 92097.0 / 339200.0
cdef double E6 = B6 - 187.0 / 2100.0
cdef double E7 = -1.0 / 40.0


def dopri_top(double b1, double b2, double b3, x0, double t_end,
              double rtol, double atol, t_out, h0=None):
    """Adaptive Dormand-Prince 5(4) with PI control for the top system."""
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef double[:, ::1] out = np.empty((tv.shape[0], 3))
    cdef double y[3]
    cdef double y1[3]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    cdef double tmp[3]
    cdef double t = 0.0
    cdef double h = 1e-3 * t_end if h0 is None else <double>h0
    cdef double h_min = 1e-12 * t_end
    cdef double err_prev = 1.0
    cdef double err, scale, e, fac
    cdef Py_ssize_t idx = 0
    cdef int i
    y[0], y[1], y[2] = x0[0], x0[1], x0[2]
    _rhs(b1, b2, b3, y, k1)
    while idx < tv.shape[0] and tv[idx] <= 0.0:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    while t < t_end - 1e-14 * fmax(1.0, t_end):
        h = fmin(h, t_end - t)
        if h < h_min:
            raise StepFailure(f"step size underflow at t={t!r} (h={h!r})")
        for i in range(3):
            tmp[i] = y[i] + h * A21 * k1[i]
        _rhs(b1, b2, b3, tmp, k2)
        for i in range(3):
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        _rhs(b1, b2, b3, tmp, k3)
        for i in range(3):
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(b1, b2, b3, tmp, k4)
        for i in range(3):
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(b1, b2, b3, tmp, k5)
        for i in range(3):
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                 + A64 * k4[i] + A65 * k5[i])
        _rhs(b1, b2, b3, tmp, k6)
        for i in range(3):
            y1[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                + B5 * k5[i] + B6 * k6[i])
        _rhs(b1, b2, b3, y1, k7)
        err = 0.0
        for i in range(3):
            scale = atol + rtol * fmax(fabs(y[i]), fabs(y1[i]))
            e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i]
                     + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]) / scale
            err += e * e
        err = sqrt(err / 3.0)
        if err <= 1.0:
            idx = _fill(out, tv, idx, t, t + h, y, y1, k1, k7)
            t += h
            for i in range(3):
                y[i] = y1[i]
                k1[i] = k7[i]
            if err > 0.0:
                fac = SAFETY * err ** (-PI_ALPHA) * err_prev ** PI_BETA
            else:
                fac = FAC_MAX
            err_prev = fmax(err, 1e-10)
        else:
            fac = SAFETY * err ** (-PI_ALPHA)
        h *= fmin(FAC_MAX, fmax(FAC_MIN, fac))
    while idx < tv.shape[0]:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    return np.asarray(out)


cdef int _solve3(double* A, double* rhs, double* sol) nogil:
    """Solve a 3x3 system by Gaussian elimination with partial pivoting."""
    cdef double M[3][4]
    cdef int i, j, p, r
    cdef double piv, factor
    for i in range(3):
        for j in range(3):
            M[i][j] = A[3 * i + j]
        M[i][3] = rhs[i]
    for i in range(3):
        p = i
        for r in range(i + 1, 3):
            if fabs(M[r][i]) > fabs(M[p][i]):
                p = r
        if fabs(M[p][i]) == 0.0:
            return 1
        if p != i:
            for j in range(4):
                piv = M[i][j]
                M[i][j] = M[p][j]
                M[p][j] = piv
        for r in range(i + 1, 3):
            factor = M[r][i] / M[i][i]
            for j in range(i, 4):
                M[r][j] -= factor * M[i][j]
    for i in range(2, -1, -1):
        piv = M[i][3]
        for j in range(i + 1, 3):
            piv -= M[i][j] * sol[j]
        sol[i] = piv / M[i][i]
    return 0


def midpoint_top(double b1, double b2, double b3, x0, double t_end,
                 double h, double newton_tol, int max_iters, t_out):
    """Implicit midpoint for the top system with exact Newton Jacobian."""
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef double[:, ::1] out = np.empty((tv.shape[0], 3))
    cdef double y[3]
    cdef double y1[3]
    cdef double fy[3]
    cdef double f1[3]
    cdef double mid[3]
    cdef double fm[3]
    cdef double g[3]
    cdef double dy[3]
    cdef double J[9]
    cdef double t = 0.0, step, res
    cdef Py_ssize_t idx = 0
    cdef int i, it
    cdef bint converged
    y[0], y[1], y[2] = x0[0], x0[1], x0[2]
    _rhs(b1, b2, b3, y, fy)
    while idx < tv.shape[0] and tv[idx] <= 0.0:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    while t < t_end - 1e-14 * fmax(1.0, t_end):
        step = fmin(h, t_end - t)
        for i in range(3):
            y1[i] = y[i] + step * fy[i]
        converged = False
        # fixed-point sweep
        for it in range(max_iters):
            for i in range(3):
                mid[i] = 0.5 * (y[i] + y1[i])
            _rhs(b1, b2, b3, mid, fm)
            res = 0.0
            for i in range(3):
                g[i] = y1[i] - y[i] - step * fm[i]
                # fmax would swallow NaN; "not <=" keeps it in the residual
                if not (fabs(g[i]) <= res):
                    res = fabs(g[i])
            if res <= newton_tol:
                converged = True
                break
            for i in range(3):
                y1[i] -= g[i]
        if not converged:
            # Newton on g(y1) = y1 - y - h f((y+y1)/2); df is exact
            for it in range(max_iters):
                for i in range(3):
                    mid[i] = 0.5 * (y[i] + y1[i])
                _rhs(b1, b2, b3, mid, fm)
                res = 0.0
                for i in range(3):
                    g[i] = y1[i] - y[i] - step * fm[i]
                    if not (fabs(g[i]) <= res):
                        res = fabs(g[i])
                if res <= newton_tol:
                    converged = True
                    break
                J[0] = 1.0
                J[1] = -0.5 * step * b1
                J[2] = 0.0
                J[3] = -0.5 * step * b2 * mid[2]
                J[4] = 1.0
                J[5] = -0.5 * step * b2 * mid[0]
                J[6] = -0.5 * step * b3 * mid[1]
                J[7] = -0.5 * step * b3 * mid[0]
                J[8] = 1.0
                if _solve3(J, g, dy) != 0:
                    raise NewtonDivergence(f"singular Newton system at t={t!r}")
                for i in range(3):
                    y1[i] -= dy[i]
        if not converged:
            raise NewtonDivergence(
                f"midpoint stage equation did not reach {newton_tol} at t={t!r}"
            )
        _rhs(b1, b2, b3, y1, f1)
        idx = _fill(out, tv, idx, t, t + step, y, y1, fy, f1)
        t += step
        for i in range(3):
            y[i] = y1[i]
            fy[i] = f1[i]
    while idx < tv.shape[0]:
        for i in range(3):
            out[idx, i] = y[i]
        idx += 1
    return np.asarray(out)
