# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels for polynomial vector fields.

A field is packed as three arrays: ``coef[T]`` (float64), ``exps[T, n]``
(int64) and ``comp[T]`` (int64, target component of each term).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, isfinite, pow as cpow

cnp.import_array()


cdef inline void _eval(const double[:] coef, const long long[:, :] exps,
                       const long long[:] comp, const double* x, double* out,
                       Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t t, j, T = coef.shape[0]
    cdef long long e, k
    cdef double m
    for j in range(n):
        out[j] = 0.0
    for t in range(T):
        m = coef[t]
        for j in range(n):
            e = exps[t, j]
            for k in range(e):
                m *= x[j]
        out[comp[t]] += m


def eval_field(const double[:] coef, const long long[:, :] exps,
               const long long[:] comp, const double[:] x):
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    cdef double[:] xc = np.ascontiguousarray(x, dtype=np.float64)
    _eval(coef, exps, comp, &xc[0], &o[0], n)
    return out


cdef void _rk4_step(const double[:] coef, const long long[:, :] exps,
                    const long long[:] comp, double* y, double h, Py_ssize_t n,
                    double* k1, double* k2, double* k3, double* k4,
                    double* tmp) noexcept nogil:
    cdef Py_ssize_t j
    _eval(coef, exps, comp, y, k1, n)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * h * k1[j]
    _eval(coef, exps, comp, tmp, k2, n)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * h * k2[j]
    _eval(coef, exps, comp, tmp, k3, n)
    for j in range(n):
        tmp[j] = y[j] + h * k3[j]
    _eval(coef, exps, comp, tmp, k4, n)
    for j in range(n):
        y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


def rk4_path(const double[:] coef, const long long[:, :] exps,
             const long long[:] comp, x0, double dt, Py_ssize_t nsteps):
    """States after 0..nsteps fixed RK4 steps of size ``dt``."""
    cdef Py_ssize_t n = len(x0), s, j
    path = np.empty((nsteps + 1, n), dtype=np.float64)
    cdef double[:, :] p = path
    work = np.empty(6 * n, dtype=np.float64)
    cdef double[:] w = work
    cdef double[:] y0 = np.ascontiguousarray(x0, dtype=np.float64)
    for j in range(n):
        w[j] = y0[j]
        p[0, j] = y0[j]
    with nogil:
        for s in range(nsteps):
            _rk4_step(coef, exps, comp, &w[0], dt, n, &w[n], &w[2 * n],
                      &w[3 * n], &w[4 * n], &w[5 * n])
            for j in range(n):
                p[s + 1, j] = w[j]
    return path


def rk4_flow(const double[:] coef, const long long[:, :] exps,
             const long long[:] comp, x0, double t, Py_ssize_t nsteps):
    """Final state of ``nsteps`` RK4 steps covering time ``t``."""
    cdef Py_ssize_t n = len(x0), s, j
    work = np.empty(6 * n, dtype=np.float64)
    cdef double[:] w = work
    cdef double[:] y0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double h = t / nsteps if nsteps > 0 else 0.0
    for j in range(n):
        w[j] = y0[j]
    with nogil:
        for s in range(nsteps):
            _rk4_step(coef, exps, comp, &w[0], h, n, &w[n], &w[2 * n],
                      &w[3 * n], &w[4 * n], &w[5 * n])
    return np.array(work[:n])


def adaptive_flow(const double[:] coef, const long long[:, :] exps,
                  const long long[:] comp, x0, double horizon, double tol,
                  double blowup, Py_ssize_t max_steps):
    """Step-doubling adaptive RK4 from 0 to ``horizon``.

    Returns ``(status, t, x)``: status 0 reached the horizon, 1 norm exceeded
    ``blowup`` (or became non-finite), 2 step size collapsed, 3 step budget
    exhausted.
    """
    cdef Py_ssize_t n = len(x0), j, steps = 0
    work = np.empty(9 * n, dtype=np.float64)
    cdef double[:] w = work
    cdef double[:] y0 = np.ascontiguousarray(x0, dtype=np.float64)
    cdef double* y = &w[0]
    cdef double* y1 = &w[n]
    cdef double* y2 = &w[2 * n]
    cdef double t = 0.0, h = horizon / 100.0, err, sc, norm, fac
    cdef int status = 0
    for j in range(n):
        y[j] = y0[j]
    with nogil:
        while t < horizon:
            if steps >= max_steps:
                status = 3
                break
            steps += 1
            if t + h > horizon:
                h = horizon - t
            for j in range(n):
                y1[j] = y[j]
                y2[j] = y[j]
            _rk4_step(coef, exps, comp, y1, h, n, &w[3 * n], &w[4 * n],
                      &w[5 * n], &w[6 * n], &w[7 * n])
            _rk4_step(coef, exps, comp, y2, 0.5 * h, n, &w[3 * n], &w[4 * n],
                      &w[5 * n], &w[6 * n], &w[7 * n])
            _rk4_step(coef, exps, comp, y2, 0.5 * h, n, &w[3 * n], &w[4 * n],
                      &w[5 * n], &w[6 * n], &w[7 * n])
            err = 0.0
            norm = 0.0
            for j in range(n):
                sc = tol * (1.0 + fabs(y[j]))
                if not isfinite(y2[j]) or not isfinite(y1[j]):
                    err = 1e300
                else:
                    err = max(err, fabs(y2[j] - y1[j]) / 15.0 / sc)
            if err <= 1.0:
                t += h
                for j in range(n):
                    y[j] = y2[j] + (y2[j] - y1[j]) / 15.0
                    norm += y[j] * y[j]
                norm = sqrt(norm)
                if not isfinite(norm) or norm > blowup:
                    status = 1
                    break
                fac = 4.0 if err < 1e-6 else min(4.0, 0.9 * cpow(err, -0.2))
            else:
                fac = 0.1 if err > 1e200 else max(0.1, 0.9 * cpow(err, -0.2))
            h *= fac
            if h < 1e-14 * max(1.0, fabs(t)):
                status = 2
                break
    return status, t, np.array(work[:n])
