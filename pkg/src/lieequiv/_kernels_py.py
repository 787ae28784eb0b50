"""Pure-Python/numpy twin of ``_kernels.pyx`` (same signatures, same results)."""

from __future__ import annotations

import math

import numpy as np


def eval_field(coef, exps, comp, x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if coef.shape[0] == 0:
        return np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up is detected by the caller
        monos = coef * np.prod(x[None, :] ** exps, axis=1)
    return np.bincount(comp, weights=monos, minlength=n).astype(np.float64)


def _rk4_step(coef, exps, comp, y, h):
    k1 = eval_field(coef, exps, comp, y)
    k2 = eval_field(coef, exps, comp, y + 0.5 * h * k1)
    k3 = eval_field(coef, exps, comp, y + 0.5 * h * k2)
    k4 = eval_field(coef, exps, comp, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_path(coef, exps, comp, x0, dt, nsteps):
    y = np.array(x0, dtype=np.float64)
    path = np.empty((nsteps + 1, y.shape[0]))
    path[0] = y
    for s in range(nsteps):
        y = _rk4_step(coef, exps, comp, y, dt)
        path[s + 1] = y
    return path


def rk4_flow(coef, exps, comp, x0, t, nsteps):
    y = np.array(x0, dtype=np.float64)
    h = t / nsteps if nsteps > 0 else 0.0
    for _ in range(nsteps):
        y = _rk4_step(coef, exps, comp, y, h)
    return y


def adaptive_flow(coef, exps, comp, x0, horizon, tol, blowup, max_steps):
    y = np.array(x0, dtype=np.float64)
    t = 0.0
    h = horizon / 100.0
    steps = 0
    status = 0
    with np.errstate(all="ignore"):
        while t < horizon:
            if steps >= max_steps:
                status = 3
                break
            steps += 1
            if t + h > horizon:
                h = horizon - t
            y1 = _rk4_step(coef, exps, comp, y, h)
            y2 = _rk4_step(coef, exps, comp, _rk4_step(coef, exps, comp, y, 0.5 * h), 0.5 * h)
            if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
                err = 1e300
            else:
                sc = tol * (1.0 + np.abs(y))
                err = float(np.max(np.abs(y2 - y1) / 15.0 / sc)) if y.size else 0.0
            if err <= 1.0:
                t += h
                y = y2 + (y2 - y1) / 15.0
                norm = math.sqrt(float(np.dot(y, y)))
                if not math.isfinite(norm) or norm > blowup:
                    status = 1
                    break
                fac = 4.0 if err < 1e-6 else min(4.0, 0.9 * err ** -0.2)
            else:
                fac = 0.1 if err > 1e200 else max(0.1, 0.9 * err ** -0.2)
            h *= fac
            if h < 1e-14 * max(1.0, abs(t)):
                status = 2
                break
    return status, t, y
