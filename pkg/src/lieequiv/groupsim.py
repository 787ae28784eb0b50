"""Catalog matrix Lie groups, linear vector fields and their flows.

Groups act on themselves by matrices.  ``algebra_basis[i]`` is the value at
the identity of the right-invariant field ``M -> B_i M``.  The bracket of two
right-invariant vector fields is minus the matrix commutator, which is what
:meth:`GroupModel.vf_structure_constants` returns; derivations are stored as
matrices on algebra coordinates (column ``j`` is ``D(B_j)``).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "expm",
    "GroupModel",
    "GroupElement",
    "LinearField",
    "PiecewiseControl",
    "Trajectory",
    "GroupMismatch",
    "catalog",
    "get_group",
    "heisenberg_matrix",
    "heisenberg_coords",
    "linear_flow",
    "automorphism_residual",
    "derivation_exp_residual",
    "bourbaki_residual",
    "identity_tangent_map",
    "verification_suite",
    "projection_check",
    "affine_decompose",
    "simulate_linear_system",
    "heisenberg_closed_form",
    "write_trajectory",
    "read_trajectory",
]


class GroupMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrix exponential

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = ((3, 1.495585217958292e-2), (5, 2.539398330063230e-1),
          (7, 9.504178996162932e-1), (9, 2.097847961257068e0))
_THETA13 = 5.371920351148152e0


def _nilpotent_series(A: np.ndarray) -> np.ndarray | None:
    n = A.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, n + 1):
        term = term @ A / k
        if not np.any(term):
            return out
        out = out + term
    return None


def _pade(A: np.ndarray, m: int) -> np.ndarray:
    b = _PADE[m]
    n = A.shape[0]
    I = np.eye(n)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A4 @ A2
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I)
        V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I
    else:
        pows = [I]
        for k in range(1, m // 2 + 1):
            pows.append(pows[-1] @ A2)
        U = sum(b[2 * k + 1] * pows[k] for k in range(m // 2 + 1))
        V = sum(b[2 * k] * pows[k] for k in range(m // 2 + 1))
        U = A @ U
    return np.linalg.solve(V - U, V + U)


def expm(A) -> np.ndarray:
    """Matrix exponential.

    Nilpotent inputs (some power ``A^k``, ``k <= size``, exactly zero) get the
    finite series; everything else uses scaling and squaring with a diagonal
    Padé approximant of degree 3..13 chosen from the 1-norm.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expm needs a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("expm needs finite entries")
    series = _nilpotent_series(A)
    if series is not None:
        return series
    norm = np.linalg.norm(A, 1)
    for m, theta in _THETA:
        if norm <= theta:
            return _pade(A, m)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    F = _pade(A / 2.0**s, 13)
    for _ in range(s):
        F = F @ F
    return F


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


# ---------------------------------------------------------------------------
# groups


def _E(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class GroupModel:
    tag: str
    matrix_size: int
    algebra_basis: tuple
    basis_names: tuple
    kind: str  # "heisenberg" | "orthogonal" | "abelian"

    @property
    def dim(self) -> int:
        return len(self.algebra_basis)

    def identity(self) -> "GroupElement":
        return GroupElement(np.eye(self.matrix_size), self)

    def from_coords(self, y: Sequence[float]) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} algebra coordinates, got shape {y.shape}")
        return np.tensordot(y, np.array(self.algebra_basis), axes=1)

    def coords(self, A) -> np.ndarray:
        """Least-squares algebra coordinates of a matrix."""
        Bm = np.array([b.ravel() for b in self.algebra_basis]).T
        return np.linalg.lstsq(Bm, np.asarray(A, dtype=float).ravel(), rcond=None)[0]

    def exp(self, y) -> "GroupElement":
        return GroupElement(expm(self.from_coords(y)), self)

    def membership_residual(self, M) -> float:
        M = np.asarray(M, dtype=float)
        n = self.matrix_size
        if M.shape != (n, n):
            return math.inf
        if self.kind == "orthogonal":
            return float(max(np.max(np.abs(M.T @ M - np.eye(n))), abs(np.linalg.det(M) - 1.0)))
        mask = self._free_mask()
        return float(np.max(np.abs((M - np.eye(n))[~mask]), initial=0.0))

    def _free_mask(self) -> np.ndarray:
        mask = np.zeros((self.matrix_size,) * 2, dtype=bool)
        for b in self.algebra_basis:
            mask |= b != 0
        return mask

    def project(self, M) -> np.ndarray:
        """Nearest-pattern representative: QR re-orthogonalisation for SO(n),
        structural zeroing for the unipotent groups."""
        M = np.asarray(M, dtype=float)
        if self.kind == "orthogonal":
            Q, R = np.linalg.qr(M)
            return Q * np.sign(np.diag(R))
        mask = self._free_mask()
        out = np.eye(self.matrix_size)
        out[mask] = M[mask]
        return out

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> "GroupElement":
        return self.exp(rng.normal(scale=scale, size=self.dim))

    def matrix_structure_constants(self) -> np.ndarray:
        """``c[i, j, k]``: coefficient of ``B_k`` in ``B_i B_j - B_j B_i``."""
        d = self.dim
        c = np.zeros((d, d, d))
        for i in range(d):
            for j in range(d):
                c[i, j] = self.coords(commutator(self.algebra_basis[i], self.algebra_basis[j]))
        return c

    def vf_structure_constants(self) -> np.ndarray:
        """Structure constants for the bracket of right-invariant vector fields."""
        return -self.matrix_structure_constants()

    def __repr__(self) -> str:
        return f"GroupModel({self.tag}, dim={self.dim}, matrix_size={self.matrix_size})"


def _heisenberg3() -> GroupModel:
    X, Y, Z = _E(3, 1, 2), _E(3, 0, 1), _E(3, 0, 2)
    return GroupModel("heisenberg3", 3, (X, Y, Z), ("X", "Y", "Z"), "heisenberg")


def _so(n: int) -> GroupModel:
    if n == 3:
        L1 = _E(3, 2, 1) - _E(3, 1, 2)
        L2 = _E(3, 0, 2) - _E(3, 2, 0)
        L3 = _E(3, 1, 0) - _E(3, 0, 1)
        return GroupModel("so3", 3, (L1, L2, L3), ("L1", "L2", "L3"), "orthogonal")
    basis, names = [], []
    for i in range(n):
        for j in range(i + 1, n):
            basis.append(_E(n, i, j) - _E(n, j, i))
            names.append(f"A{i + 1}{j + 1}")
    return GroupModel(f"so{n}", n, tuple(basis), tuple(names), "orthogonal")


def _abelian(n: int) -> GroupModel:
    basis = tuple(_E(n + 1, i, n) for i in range(n))
    return GroupModel(f"abelian{n}", n + 1, basis, tuple(f"T{i + 1}" for i in range(n)), "abelian")


_CATALOG: dict[str, GroupModel] = {}


def catalog() -> dict[str, GroupModel]:
    """All catalog groups by tag (shared, immutable instances)."""
    if not _CATALOG:
        _CATALOG["heisenberg3"] = _heisenberg3()
        for n in range(2, 6):
            _CATALOG[f"so{n}"] = _so(n)
        for n in range(1, 5):
            _CATALOG[f"abelian{n}"] = _abelian(n)
    return dict(_CATALOG)


def get_group(name: str) -> GroupModel:
    key = name.lower().replace("(", "").replace(")", "").replace("_", "").replace(" ", "")
    key = {"heisenberg": "heisenberg3", "h3": "heisenberg3"}.get(key, key)
    if key.startswith("r") and key[1:].isdigit():
        key = f"abelian{key[1:]}"
    cat = catalog()
    if key not in cat:
        raise KeyError(f"unknown group {name!r}; catalog: {', '.join(cat)}")
    return cat[key]


def heisenberg_matrix(x, y, z) -> np.ndarray:
    return np.array([[1.0, y, z], [0.0, 1.0, x], [0.0, 0.0, 1.0]])


def heisenberg_coords(M) -> np.ndarray:
    M = np.asarray(M)
    return np.array([M[1, 2], M[0, 1], M[0, 2]])


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    group: GroupModel
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        if self.check:
            r = self.group.membership_residual(self.matrix)
            if r > 1e-9:
                raise ValueError(f"matrix is not in {self.group.tag} (residual {r:.3g})")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.group.tag != self.group.tag:
            raise GroupMismatch("elements of different groups")
        return GroupElement(self.matrix @ other.matrix, self.group, check=False)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.group, check=False)


# ---------------------------------------------------------------------------
# linear fields


@dataclass(frozen=True, eq=False)
class LinearField:
    """A linear vector field on a catalog group.

    ``kind == "inner"``: ``M -> XM - MX`` for an algebra matrix ``X``, flow
    ``e^{tX} M e^{-tX}``.  ``kind == "coordinate"``: the Heisenberg field
    ``x d/dy + x^2/2 d/dz`` in unipotent coordinates, whose derivation sends
    ``X`` to ``Y`` and kills ``Y`` and ``Z``.
    """

    group: GroupModel
    kind: str
    derivation: np.ndarray
    X: np.ndarray | None = None

    @classmethod
    def inner(cls, group: GroupModel, X) -> "LinearField":
        X = np.asarray(X, dtype=float)
        d = group.dim
        D = np.zeros((d, d))
        for j, B in enumerate(group.algebra_basis):
            D[:, j] = group.coords(commutator(X, B))
        return cls(group, "inner", D, X)

    @classmethod
    def heisenberg_coordinate(cls, group: GroupModel | None = None) -> "LinearField":
        group = group or get_group("heisenberg3")
        if group.kind != "heisenberg":
            raise GroupMismatch("the coordinate field lives on heisenberg3")
        D = np.zeros((3, 3))
        D[1, 0] = 1.0
        return cls(group, "coordinate", D)

    def value(self, M) -> np.ndarray:
        """Tangent matrix of the field at ``M``."""
        M = np.asarray(M, dtype=float)
        if self.kind == "inner":
            return self.X @ M - M @ self.X
        x = M[1, 2]
        T = np.zeros((3, 3))
        T[0, 1] = x
        T[0, 2] = 0.5 * x * x
        return T

    def flow_matrix(self, t: float, M) -> np.ndarray:
        M = np.asarray(M, dtype=float)
        if self.kind == "inner":
            return expm(t * self.X) @ M @ expm(-t * self.X)
        x, y, z = heisenberg_coords(M)
        return heisenberg_matrix(x, y + t * x, z + 0.5 * t * x * x)


def _check_group(F: LinearField, *elements: GroupElement):
    for e in elements:
        if e.group.tag != F.group.tag:
            raise GroupMismatch(f"element of {e.group.tag}, field on {F.group.tag}")


def linear_flow(F: LinearField, t: float, M: GroupElement) -> GroupElement:
    _check_group(F, M)
    return GroupElement(F.flow_matrix(t, M.matrix), F.group)


def automorphism_residual(F: LinearField, M: GroupElement, N: GroupElement, t: float) -> float:
    """``max |phi_t(MN) - phi_t(M) phi_t(N)|``."""
    _check_group(F, M, N)
    lhs = F.flow_matrix(t, M.matrix @ N.matrix)
    rhs = F.flow_matrix(t, M.matrix) @ F.flow_matrix(t, N.matrix)
    return float(np.max(np.abs(lhs - rhs)))


def derivation_exp_residual(F: LinearField, y: Sequence[float], t: float) -> float:
    """``max |phi_t(exp Y) - exp(e^{tD} Y)|`` for algebra coordinates ``y``."""
    G = F.group
    y = np.asarray(y, dtype=float)
    if y.shape != (G.dim,):
        raise ValueError(f"expected {G.dim} algebra coordinates")
    lhs = F.flow_matrix(t, expm(G.from_coords(y)))
    rhs = expm(G.from_coords(expm(t * F.derivation) @ y))
    return float(np.max(np.abs(lhs - rhs)))


def bourbaki_residual(F: LinearField, M: GroupElement, N: GroupElement) -> float:
    """``max |F(MN) - (M F(N) + F(M) N)|``: left and right translates."""
    _check_group(F, M, N)
    A, B = M.matrix, N.matrix
    return float(np.max(np.abs(F.value(A @ B) - (A @ F.value(B) + F.value(A) @ B))))


def identity_tangent_map(F: LinearField, t: float, s: float = 1e-5) -> np.ndarray:
    """Finite-difference tangent map of ``phi_t`` at the identity, in algebra
    coordinates (column ``j`` is the image of ``B_j``)."""
    G = F.group
    cols = []
    for B in G.algebra_basis:
        plus = F.flow_matrix(t, expm(s * B))
        minus = F.flow_matrix(t, expm(-s * B))
        cols.append(G.coords((plus - minus) / (2 * s)))
    return np.array(cols).T


def verification_suite(G: GroupModel, trials: int = 100, seed: int = 0) -> dict[str, float]:
    """Worst residuals of the automorphism and exponential identities.

    Each trial draws a linear field (an inner field ``ad X`` for random
    ``X``; on heisenberg3 every other trial uses the coordinate field), two
    elements ``M, N`` and times ``s, t`` in ``[-2, 2]``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(("automorphism", "identity", "group_law", "derivation_exp", "bourbaki"), 0.0)
    I = np.eye(G.matrix_size)
    for k in range(trials):
        if G.kind == "heisenberg" and k % 2 == 0:
            F = LinearField.heisenberg_coordinate(G)
        else:
            F = LinearField.inner(G, G.from_coords(rng.normal(size=G.dim)))
        M, N = G.random_element(rng), G.random_element(rng)
        s, t = rng.uniform(-2.0, 2.0, size=2)
        once = F.flow_matrix(s, F.flow_matrix(t, M.matrix))
        res = {
            "automorphism": automorphism_residual(F, M, N, t),
            "identity": float(np.max(np.abs(F.flow_matrix(t, I) - I))),
            "group_law": float(np.max(np.abs(once - F.flow_matrix(s + t, M.matrix)))),
            "derivation_exp": derivation_exp_residual(F, rng.normal(size=G.dim), t),
            "bourbaki": bourbaki_residual(F, M, N),
        }
        for key, v in res.items():
            worst[key] = max(worst[key], v)
    return worst


def projection_check(X, h_basis: Sequence, tol: float = 1e-10) -> bool:
    """True when ``[X, h_i]`` lies in ``span(h_basis)`` for every ``i``."""
    X = np.asarray(X, dtype=float)
    if not h_basis:
        return True
    H = np.array([np.asarray(h, dtype=float).ravel() for h in h_basis]).T
    for h in h_basis:
        c = commutator(X, np.asarray(h, dtype=float)).ravel()
        coef = np.linalg.lstsq(H, c, rcond=None)[0]
        if np.linalg.norm(H @ coef - c) > tol:
            return False
    return True


def affine_decompose(F_at: Callable[[np.ndarray], np.ndarray], G: GroupModel):
    """Split an affine field into a linear part and a left-invariant one.

    Returns ``(linear_part, C)`` with ``C = F_at(I)``; ``linear_part(M)`` is
    ``F_at(M) - M C`` and vanishes at the identity.
    """
    I = np.eye(G.matrix_size)
    C = np.array(F_at(I), dtype=float)

    def linear_part(M):
        M = np.asarray(M, dtype=float)
        return np.asarray(F_at(M), dtype=float) - M @ C

    return linear_part, C


# ---------------------------------------------------------------------------
# controls and simulation


@dataclass(frozen=True)
class PiecewiseControl:
    """Piecewise-constant control: ``pieces[k] = (values, duration)``.

    After the last piece the final value is held.
    """

    pieces: tuple

    @classmethod
    def constant(cls, value, m: int = 1, duration: float = math.inf) -> "PiecewiseControl":
        vals = tuple(float(v) for v in np.broadcast_to(np.asarray(value, dtype=float), (m,)))
        return cls(((vals, duration),))

    @classmethod
    def parse(cls, spec: str, m: int = 1) -> "PiecewiseControl":
        """``"v@d;v@d;..."`` pieces or a single constant; ``v`` may be a
        comma-separated vector for several controls."""
        spec = spec.strip()
        if not spec:
            raise ValueError("empty control spec")
        pieces = []
        for chunk in spec.split(";"):
            chunk = chunk.strip()
            if "@" in chunk:
                vals, dur = chunk.split("@", 1)
                duration = float(dur)
                if not duration > 0:
                    raise ValueError(f"piece duration must be positive in {chunk!r}")
            else:
                vals, duration = chunk, math.inf
            vec = tuple(float(v) for v in vals.split(","))
            if len(vec) == 1 and m > 1:
                vec = vec * m
            if len(vec) != m:
                raise ValueError(f"control piece {chunk!r} has {len(vec)} values, expected {m}")
            pieces.append((vec, duration))
        if any(math.isinf(d) for _, d in pieces[:-1]):
            raise ValueError("only the last piece may omit its duration")
        return cls(tuple(pieces))

    @property
    def m(self) -> int:
        return len(self.pieces[0][0])

    def switch_times(self) -> list[float]:
        out, t = [], 0.0
        for _, d in self.pieces[:-1]:
            t += d
            out.append(t)
        return out

    def __call__(self, t: float) -> np.ndarray:
        acc = 0.0
        for vals, d in self.pieces:
            acc += d
            if t < acc:
                return np.array(vals)
        return np.array(self.pieces[-1][0])

    def intervals(self, T: float):
        """``(t0, t1, values)`` covering ``[0, T]``."""
        out, t = [], 0.0
        for vals, d in self.pieces:
            if t >= T:
                break
            t1 = min(T, t + d)
            out.append((t, t1, np.array(vals)))
            t = t1
        if t < T:
            out.append((t, T, np.array(self.pieces[-1][0])))
        return out

    def __str__(self) -> str:
        parts = []
        for vals, d in self.pieces:
            v = ",".join(repr(x) for x in vals)
            parts.append(v if math.isinf(d) else f"{v}@{d!r}")
        return ";".join(parts)


def _substeps(t0: float, t1: float, switches: Sequence[float]) -> list[float]:
    cuts = [t0] + [s for s in switches if t0 < s < t1] + [t1]
    return cuts


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), size, size) for groups, (len(times), n) for ℝⁿ systems

    def __len__(self) -> int:
        return len(self.times)


def simulate_linear_system(G: GroupModel, F: LinearField | None, Y_controls: Sequence,
                           u: PiecewiseControl, t_grid, M0=None) -> Trajectory:
    """RK4 for ``M' = F(M) + sum_j u_j(t) Y_j M`` with per-step projection.

    Steps run between consecutive grid times, split at control switches.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    Ys = [np.asarray(Y, dtype=float) for Y in Y_controls]
    if len(Ys) != u.m:
        raise ValueError(f"{len(Ys)} control matrices but the control has {u.m} components")
    if F is not None and F.group.tag != G.tag:
        raise GroupMismatch("linear field belongs to another group")
    M = np.eye(G.matrix_size) if M0 is None else np.asarray(getattr(M0, "matrix", M0), dtype=float)
    switches = u.switch_times()

    def rhs(A, uv):
        out = F.value(A) if F is not None else np.zeros_like(A)
        for uj, Y in zip(uv, Ys):
            if uj:
                out = out + uj * (Y @ A)
        return out

    states = [M.copy()]
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        cuts = _substeps(t0, t1, switches)
        for a, b in zip(cuts[:-1], cuts[1:]):
            h = b - a
            uv = u(0.5 * (a + b))
            k1 = rhs(M, uv)
            k2 = rhs(M + 0.5 * h * k1, uv)
            k3 = rhs(M + 0.5 * h * k2, uv)
            k4 = rhs(M + h * k3, uv)
            M = G.project(M + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
        states.append(M.copy())
    return Trajectory(t_grid, np.array(states))


def heisenberg_closed_form(u: PiecewiseControl, t_grid, start=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Exact ``(x, y, z)`` of ``x' = u, y' = x, z' = x^2/2`` on ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty((len(t_grid), 3))
    x, y, z = (float(v) for v in start)
    t = 0.0
    switches = u.switch_times()

    def advance(x, y, z, s, v):
        return (
            x + v * s,
            y + x * s + 0.5 * v * s * s,
            z + 0.5 * (x * x * s + x * v * s * s + v * v * s**3 / 3.0),
        )

    for k, tk in enumerate(t_grid):
        for a, b in zip(_substeps(t, tk, switches)[:-1], _substeps(t, tk, switches)[1:]):
            x, y, z = advance(x, y, z, b - a, float(u(0.5 * (a + b))[0]))
        t = tk
        out[k] = (x, y, z)
    return out


# ---------------------------------------------------------------------------
# trajectory export


def write_trajectory(traj: Trajectory, fh=None, names: Sequence[str] | None = None) -> str:
    """Delimited text: header row naming the entries, one row per grid time.

    Matrix trajectories are flattened row-major with entries ``m11, m12, ...``.
    """
    states = np.asarray(traj.states)
    flat = states.reshape(len(states), -1)
    if names is None:
        if states.ndim == 3:
            k = states.shape[1]
            names = [f"m{i + 1}{j + 1}" for i in range(k) for j in range(states.shape[2])]
        else:
            names = [f"s{i + 1}" for i in range(flat.shape[1])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in flat:
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_trajectory(fh) -> tuple[list[str], np.ndarray]:
    text = fh.read() if hasattr(fh, "read") else str(fh)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty trajectory file")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body if r], dtype=float).reshape(-1, len(header))
    return header, data
