"""Pointwise realisation of the diffeomorphism between a state space and G/H.

A flow word ``[(i_1, t_1), ..., (i_r, t_r)]`` sends the base point ``p0`` to
``gamma^{i_r}_{t_r} o ... o gamma^{i_1}_{t_1}(p0)`` and the identity of ``G``
to ``exp(t_r Y_{i_r}) ... exp(t_1 Y_{i_1})``.  The leftmost letter acts first;
later letters multiply on the left.  The map between the two sides is only
evaluated along such words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groupsim import GroupModel, PiecewiseControl, expm, get_group
from .kernels import IntegrationError, PackedField
from .liealg import LieBasis, VField, structure_constants

__all__ = [
    "FlowWord",
    "EquivalenceProbe",
    "heisenberg_probe",
    "so3_probe",
    "flow_word_state",
    "flow_word_group",
    "well_definedness_residual",
    "pushforward_residual",
    "manufactured_word_pair",
    "simulate_control_affine",
    "heisenberg_equivalence_demo",
    "DemoReport",
]

FLOW_STEP = 1e-3
SAME_ELEMENT_TOL = 1e-8


@dataclass(frozen=True)
class FlowWord:
    letters: tuple = ()

    def __init__(self, letters: Sequence = ()):
        object.__setattr__(self, "letters", tuple((int(i), float(t)) for i, t in letters))

    def __add__(self, other) -> "FlowWord":
        tail = other.letters if isinstance(other, FlowWord) else FlowWord(other).letters
        return FlowWord(self.letters + tail)

    def inverse(self) -> "FlowWord":
        return FlowWord([(i, -t) for i, t in reversed(self.letters)])

    def __len__(self) -> int:
        return len(self.letters)


def _constant_velocity(X: VField) -> bool:
    # each component depends only on variables the field does not move
    moving = {v for v, c in zip(X.vars, X.components) if not c.is_zero()}
    return all(not (c.variables_used() & moving) for c in X.components)


@dataclass
class EquivalenceProbe:
    """Base point, system basis and a catalog group with matched ordering.

    Construction checks that the system basis and the group's right-invariant
    fields have the same structure constants within ``tol``.
    """

    base_point: np.ndarray
    basis: list
    group: GroupModel
    tol: float = 1e-10
    structure_defect: float = field(init=False, default=math.nan)

    def __post_init__(self):
        self.base_point = np.asarray(self.base_point, dtype=float)
        if len(self.basis) != self.group.dim:
            raise ValueError(f"{len(self.basis)} system fields but {self.group.tag} has dimension {self.group.dim}")
        if self.base_point.shape != (self.basis[0].n,):
            raise ValueError("base point dimension does not match the fields")
        S = structure_constants(LieBasis(self.basis))
        self.structure_defect = float(np.max(np.abs(S.as_float() - self.group.vf_structure_constants())))
        if self.structure_defect > self.tol:
            raise ValueError(
                f"structure constants differ from {self.group.tag} by {self.structure_defect:.3g}"
            )
        self._closed = [_constant_velocity(X) for X in self.basis]

    def flow(self, k: int, t: float, p: np.ndarray) -> np.ndarray:
        X = self.basis[k]
        if self._closed[k]:
            return p + t * X.at_float(p)
        return X.packed().flow(p, t, FLOW_STEP)

    def _check_word(self, w: FlowWord):
        for i, _ in w.letters:
            if not 0 <= i < len(self.basis):
                raise IndexError(f"generator index {i} out of range 0..{len(self.basis) - 1}")


def heisenberg_probe(base_point=(0.0, 0.0)) -> EquivalenceProbe:
    """``(d/dy, 2y d/dx, 2 d/dx)`` on the plane matched with ``(X, Y, Z)``."""
    v = ("x", "y")
    basis = [VField.parse(v, ["0", "1"]), VField.parse(v, ["2*y", "0"]), VField.parse(v, ["2", "0"])]
    return EquivalenceProbe(np.asarray(base_point, dtype=float), basis, get_group("heisenberg3"))


def so3_probe(base_point=(1.0, 0.0, 0.0)) -> EquivalenceProbe:
    """Rotation fields ``x -> L_i x`` on R^3 matched with the so(3) basis.

    Their orbit through a nonzero base point is a sphere, a quotient of SO(3)
    by the stabiliser of the base point.
    """
    v = ("x", "y", "z")
    basis = [
        VField.parse(v, ["0", "-z", "y"]),
        VField.parse(v, ["z", "0", "-x"]),
        VField.parse(v, ["-y", "x", "0"]),
    ]
    return EquivalenceProbe(np.asarray(base_point, dtype=float), basis, get_group("so3"))


def flow_word_state(P: EquivalenceProbe, w: FlowWord) -> np.ndarray:
    P._check_word(w)
    p = P.base_point.copy()
    for i, t in w.letters:
        p = P.flow(i, t, p)
    return p


def flow_word_group(P: EquivalenceProbe, w: FlowWord) -> np.ndarray:
    P._check_word(w)
    G = P.group
    x = np.eye(G.matrix_size)
    for i, t in w.letters:
        x = expm(t * G.algebra_basis[i]) @ x
    return x


def well_definedness_residual(P: EquivalenceProbe, w1: FlowWord, w2: FlowWord) -> float | None:
    """State distance for two words reaching the same group element.

    Returns None (not comparable) when the group elements differ by more
    than 1e-8 in Frobenius norm.
    """
    g1, g2 = flow_word_group(P, w1), flow_word_group(P, w2)
    if np.linalg.norm(g1 - g2) > SAME_ELEMENT_TOL:
        return None
    return float(np.linalg.norm(flow_word_state(P, w1) - flow_word_state(P, w2)))


def pushforward_residual(P: EquivalenceProbe, w: FlowWord, k: int, h: float = 1e-5,
                         scheme: str = "central") -> float:
    """``|d/ds state(w + [(k, s)])|_{s=0} - g_k(state(w))|`` by finite differences."""
    p = flow_word_state(P, w)
    if scheme == "central":
        d = (P.flow(k, h, p) - P.flow(k, -h, p)) / (2 * h)
    elif scheme == "forward":
        d = (P.flow(k, h, p) - p) / h
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return float(np.linalg.norm(d - P.basis[k].at_float(p)))


def manufactured_word_pair(P: EquivalenceProbe, rng: np.random.Generator, length: int = 4):
    """Two different words that reach the same group element.

    The second word is the first with an inverse pair ``u, u^{-1}`` spliced
    in; on Heisenberg probes a letter of the centre ``Z`` may also be
    replaced by the matching commutator word ``X, Y, X^{-1}, Y^{-1}``.
    """
    d = len(P.basis)
    w = [(int(rng.integers(d)), float(rng.uniform(-1.5, 1.5))) for _ in range(length)]
    w2 = list(w)
    u = [(int(rng.integers(d)), float(rng.uniform(-1.5, 1.5))) for _ in range(int(rng.integers(1, 3)))]
    pos = int(rng.integers(len(w2) + 1))
    w2[pos:pos] = u + [(i, -t) for i, t in reversed(u)]
    if P.group.kind == "heisenberg":
        # [(Z, ab)] ~ [(X, a), (Y, b), (X, -a), (Y, -b)]
        for j, (i, t) in enumerate(w2):
            if i == 2:
                a = float(rng.uniform(0.5, 1.5)) * (1 if t >= 0 else -1)
                b = abs(t) / abs(a)
                w2[j:j + 1] = [(0, a), (1, b), (0, -a), (1, -b)]
                break
    return FlowWord(w), FlowWord(w2)


# ---------------------------------------------------------------------------
# trajectory demonstration


def simulate_control_affine(drift: VField, controls: Sequence[VField], u: PiecewiseControl,
                            T: float, x0, dt: float = 1e-3):
    """RK4 trajectory of ``x' = f(x) + sum_j u_j g_j(x)``; times are aligned to
    control switches.  Returns ``(times, states)``."""
    if u.m != len(controls):
        raise ValueError(f"control has {u.m} components, system has {len(controls)} control fields")
    if not T > 0:
        raise ValueError("T must be positive")
    comps = [list(drift.components)] + [list(g.components) for g in controls]
    x = np.asarray(x0, dtype=float)
    times, states = [0.0], [x.copy()]
    for t0, t1, vals in u.intervals(T):
        field_ = PackedField.from_polys(comps, [1.0, *vals])
        nsteps = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
        path = field_.path(x, (t1 - t0) / nsteps, nsteps)
        if not np.all(np.isfinite(path)):
            raise IntegrationError("trajectory blew up")
        times.extend(np.linspace(t0, t1, nsteps + 1)[1:])
        states.extend(path[1:])
        x = path[-1]
    return np.array(times), np.array(states)


def _heisenberg_sigma_closed(u: PiecewiseControl, times) -> np.ndarray:
    # x' = y^2, y' = u ; y piecewise linear so x integrates exactly
    out = np.empty((len(times), 2))
    for k, t in enumerate(times):
        x = y = 0.0
        for t0, t1, vals in u.intervals(t) if t > 0 else []:
            s, v = t1 - t0, float(vals[0])
            x += y * y * s + y * v * s * s + v * v * s**3 / 3.0
            y += v * s
        out[k] = (x, y)
    return out


@dataclass
class DemoReport:
    times: np.ndarray
    sigma: np.ndarray
    sigma_prime: np.ndarray
    mapped: np.ndarray
    deviation: np.ndarray
    closed_form_deviation: float
    tol: float

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviation))

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def table(self, every: int = 100) -> str:
        lines = [f"{'t':>8} {'x':>14} {'y':>14} {'2z':>14} {'x_prime':>14} {'deviation':>11}"]
        idx = list(range(0, len(self.times), max(1, every)))
        if idx[-1] != len(self.times) - 1:
            idx.append(len(self.times) - 1)
        for k in idx:
            (x, y), (a, b) = self.sigma[k], self.mapped[k]
            lines.append(f"{self.times[k]:8.4f} {x:14.9f} {y:14.9f} {a:14.9f} {b:14.9f} {self.deviation[k]:11.3e}")
        return "\n".join(lines)

    def summary(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "closed_form_deviation": self.closed_form_deviation,
            "tol": self.tol,
            "pass": self.passed,
        }


def heisenberg_equivalence_demo(control: PiecewiseControl, T: float, dt: float = 1e-3,
                                tol: float = 1e-6) -> DemoReport:
    """Run ``x' = y^2, y' = u`` and ``x' = u, z' = x^2/2`` under one control.

    The second system is mapped to the first by ``(x, z) -> (2z, x)``; the
    report holds the pointwise deviation and, as an oracle, the distance of
    both runs from the closed-form solution.
    """
    v2 = ("x", "y")
    sigma_f, sigma_g = VField.parse(v2, ["y^2", "0"]), VField.parse(v2, ["0", "1"])
    vp = ("x", "z")
    prime_f, prime_g = VField.parse(vp, ["0", "1/2*x^2"]), VField.parse(vp, ["1", "0"])
    times, sigma = simulate_control_affine(sigma_f, [sigma_g], control, T, (0.0, 0.0), dt)
    times2, prime = simulate_control_affine(prime_f, [prime_g], control, T, (0.0, 0.0), dt)
    if len(times) != len(times2) or np.max(np.abs(times - times2)) > 1e-12:  # pragma: no cover
        raise RuntimeError("time grids differ")
    mapped = np.column_stack([2.0 * prime[:, 1], prime[:, 0]])
    deviation = np.linalg.norm(mapped - sigma, axis=1)
    closed = _heisenberg_sigma_closed(control, times)
    cf = float(max(np.max(np.abs(sigma - closed)), np.max(np.abs(mapped - closed))))
    return DemoReport(times, sigma, prime, mapped, deviation, cf, tol)
