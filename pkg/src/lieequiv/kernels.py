"""Backend selection for the float kernels.

The compiled extension ``lieequiv._kernels`` is used when it imports;
otherwise the numpy twin in ``lieequiv._kernels_py`` is used.  Setting
``LIEEQUIV_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py

_backend = _kernels_py
BACKEND = "python"
if os.environ.get("LIEEQUIV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on build
        _compiled = None
    else:
        _backend = _compiled
        BACKEND = "compiled"
else:
    _compiled = None


def backend_module(name: str | None = None):
    """Kernel module by name (``"compiled"``/``"python"``); default is the active one."""
    if name is None:
        return _backend
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


class IntegrationError(RuntimeError):
    """Numerical integration blew up (non-finite or huge state)."""


@dataclass(frozen=True)
class PackedField:
    """Float packing of a polynomial vector field for the kernels."""

    n: int
    coef: np.ndarray
    exps: np.ndarray
    comp: np.ndarray

    @classmethod
    def from_polys(cls, polys, scales=None) -> "PackedField":
        """Pack ``sum_k scales[k] * polys[k]`` where ``polys`` is a list of
        component lists (one per field).  With ``scales`` omitted, ``polys``
        is a single field's component list."""
        if scales is None:
            fields, scales = [polys], [1.0]
        else:
            fields = polys
        n = len(fields[0])
        coef, exps, comp = [], [], []
        for comps, s in zip(fields, scales):
            if s == 0:
                continue
            for i, p in enumerate(comps):
                for e, c in p.items():
                    coef.append(float(c) * s)
                    exps.append(e)
                    comp.append(i)
        return cls(
            n,
            np.asarray(coef, dtype=np.float64),
            np.asarray(exps, dtype=np.int64).reshape(len(coef), n),
            np.asarray(comp, dtype=np.int64),
        )

    def negated(self) -> "PackedField":
        return PackedField(self.n, -self.coef, self.exps, self.comp)

    def __call__(self, x, backend=None) -> np.ndarray:
        k = backend_module(backend)
        return k.eval_field(self.coef, self.exps, self.comp, np.asarray(x, dtype=np.float64))

    def flow(self, x0, t: float, dt: float = 1e-3, backend=None) -> np.ndarray:
        """RK4 flow for time ``t`` with steps no larger than ``dt``."""
        k = backend_module(backend)
        nsteps = max(1, int(np.ceil(abs(t) / dt - 1e-9)))
        out = k.rk4_flow(self.coef, self.exps, self.comp, np.asarray(x0, dtype=np.float64), float(t), nsteps)
        if not np.all(np.isfinite(out)) or np.max(np.abs(out), initial=0.0) > 1e12:
            raise IntegrationError(f"flow blew up from {list(x0)} over t={t}")
        return out

    def path(self, x0, dt: float, nsteps: int, backend=None) -> np.ndarray:
        k = backend_module(backend)
        return k.rk4_path(self.coef, self.exps, self.comp, np.asarray(x0, dtype=np.float64), float(dt), int(nsteps))

    def adaptive(self, x0, horizon: float, tol: float = 1e-10, blowup: float = 1e12,
                 max_steps: int = 200000, backend=None):
        k = backend_module(backend)
        return k.adaptive_flow(
            self.coef, self.exps, self.comp, np.asarray(x0, dtype=np.float64),
            float(horizon), float(tol), float(blowup), int(max_steps),
        )
