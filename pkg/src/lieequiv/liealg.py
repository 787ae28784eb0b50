"""Lie brackets of polynomial vector fields and exact Lie-algebra data.

Bracket convention: ``[X, Y]^i = sum_j X^j d_j Y^i - Y^j d_j X^i``, so that
``[d/dy, y^2 d/dx] = 2y d/dx``.

Every span and rank decision is made by exact Gaussian elimination over the
rationals.  Each field is a sparse rational vector indexed by
``(component, monomial)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .exact import SpanReducer, inertia, rank
from .kernels import PackedField
from .symexpr import Poly, PolyError, evaluate, parse_polynomial

__all__ = [
    "VField",
    "LieBasis",
    "StructureTensor",
    "DerivationMatrix",
    "GenericRank",
    "AlgebraTag",
    "DimensionExceeded",
    "NotClosed",
    "NotNormalizing",
    "lie_bracket",
    "lie_closure",
    "ideal_closure",
    "structure_constants",
    "rank_at",
    "generic_rank",
    "drift_derivation",
    "identify_algebra",
]


class DimensionExceeded(RuntimeError):
    def __init__(self, depth: int, dim: int, reason: str = ""):
        self.depth = depth
        self.dim = dim
        super().__init__(f"Lie closure not stabilised: depth {depth}, dimension {dim}{reason}")


class NotClosed(ValueError):
    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"bracket of basis elements {i} and {j} leaves the span")


class NotNormalizing(ValueError):
    def __init__(self, index: int, bracket: "VField"):
        self.index = index
        self.bracket = bracket
        super().__init__(f"[f, X_{index}] = {bracket} is not in the span")


class VField:
    """Coordinate vector field ``sum_i components[i] d/d vars[i]``."""

    __slots__ = ("vars", "components", "_packed")

    def __init__(self, vars: Sequence[str], components: Sequence[Poly]):
        self.vars = tuple(vars)
        comps = tuple(components)
        if len(comps) != len(self.vars):
            raise PolyError(f"{len(comps)} components for {len(self.vars)} variables")
        for c in comps:
            if c.vars != self.vars:
                raise PolyError(f"component over {c.vars}, field over {self.vars}")
        self.components = comps
        self._packed = None

    @classmethod
    def parse(cls, vars: Sequence[str], texts: Sequence[str]) -> "VField":
        vars = tuple(vars)
        return cls(vars, [parse_polynomial(t, vars) for t in texts])

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "VField":
        return cls(vars, [Poly.zero(vars)] * len(vars))

    @property
    def n(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def coordinate_vector(self) -> dict[tuple[int, tuple[int, ...]], Fraction]:
        return {(i, e): c for i, p in enumerate(self.components) for e, c in p.items()}

    def _check(self, other: "VField"):
        if other.vars != self.vars:
            raise PolyError(f"variable lists differ: {self.vars} vs {other.vars}")

    def __add__(self, other: "VField") -> "VField":
        self._check(other)
        return VField(self.vars, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VField") -> "VField":
        self._check(other)
        return VField(self.vars, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VField":
        return VField(self.vars, [-a for a in self.components])

    def scale(self, c) -> "VField":
        return VField(self.vars, [a.scale(c) for a in self.components])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VField):
            return NotImplemented
        return self.vars == other.vars and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.vars, self.components))

    def __call__(self, point) -> tuple:
        return tuple(evaluate(c, point) for c in self.components)

    def packed(self) -> PackedField:
        if self._packed is None:
            self._packed = PackedField.from_polys(list(self.components))
        return self._packed

    def at_float(self, point) -> np.ndarray:
        return self.packed()(np.asarray(point, dtype=np.float64))

    def __str__(self) -> str:
        parts = []
        for v, c in zip(self.vars, self.components):
            if c.is_zero():
                continue
            s = str(c)
            if len(c) > 1:
                s = f"({s})"
            if s == "1":
                s = ""
            elif s == "-1":
                s = "-"
            else:
                s += " "
            parts.append(f"{s}∂/∂{v}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"VField({str(self)!r})"


def lie_bracket(X: VField, Y: VField) -> VField:
    X._check(Y)
    comps = []
    for i in range(X.n):
        acc = Poly.zero(X.vars)
        for j, v in enumerate(X.vars):
            if X.components[j] and Y.components[i]:
                acc = acc + X.components[j] * Y.components[i].diff(v)
            if Y.components[j] and X.components[i]:
                acc = acc - Y.components[j] * X.components[i].diff(v)
        comps.append(acc)
    return VField(X.vars, comps)


@dataclass(frozen=True)
class StructureTensor:
    """``c[i][j][k]`` is the coefficient of ``X_k`` in ``[X_i, X_j]``."""

    dim: int
    c: tuple

    @classmethod
    def from_nested(cls, c) -> "StructureTensor":
        d = len(c)
        return cls(d, tuple(tuple(tuple(Fraction(v) for v in row) for row in plane) for plane in c))

    def bracket(self, a: Sequence, b: Sequence) -> list[Fraction]:
        """Bracket of two coordinate vectors."""
        d = self.dim
        out = [Fraction(0)] * d
        for i in range(d):
            if not a[i]:
                continue
            for j in range(d):
                if not b[j]:
                    continue
                f = a[i] * b[j]
                for k in range(d):
                    if self.c[i][j][k]:
                        out[k] += f * self.c[i][j][k]
        return out

    def antisymmetry_defect(self) -> Fraction:
        d = self.dim
        return max(
            (abs(self.c[i][j][k] + self.c[j][i][k]) for i in range(d) for j in range(d) for k in range(d)),
            default=Fraction(0),
        )

    def jacobi_defect(self) -> Fraction:
        d = self.dim
        c = self.c
        worst = Fraction(0)
        for i, j, k in product(range(d), repeat=3):
            for l in range(d):
                s = sum(
                    c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l]
                    for m in range(d)
                )
                worst = max(worst, abs(s))
        return worst

    def as_float(self) -> np.ndarray:
        return np.array(self.c, dtype=float).reshape(self.dim, self.dim, self.dim)

    def is_abelian(self) -> bool:
        return all(v == 0 for plane in self.c for row in plane for v in row)


@dataclass(frozen=True)
class DerivationMatrix:
    """Column ``j`` holds the coordinates of ``D(X_j)``."""

    dim: int
    entries: tuple

    def column(self, j: int) -> list[Fraction]:
        return [self.entries[i][j] for i in range(self.dim)]

    def apply(self, v: Sequence) -> list[Fraction]:
        return [sum(self.entries[i][j] * v[j] for j in range(self.dim)) for i in range(self.dim)]

    def leibniz_defect(self, S: StructureTensor) -> Fraction:
        d = self.dim
        worst = Fraction(0)
        for i in range(d):
            ei = [Fraction(int(k == i)) for k in range(d)]
            for j in range(d):
                ej = [Fraction(int(k == j)) for k in range(d)]
                lhs = self.apply(S.bracket(ei, ej))
                r1 = S.bracket(self.column(i), ej)
                r2 = S.bracket(ei, self.column(j))
                worst = max([worst] + [abs(a - b - c) for a, b, c in zip(lhs, r1, r2)])
        return worst

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def as_float(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.dim, self.dim)


class LieBasis:
    """Ordered, exactly independent list of vector fields.

    ``structure`` is filled in when the span is closed under brackets.
    """

    def __init__(self, elements: Sequence[VField], structure: StructureTensor | None = None):
        elements = list(elements)
        if not elements:
            raise ValueError("empty basis")
        self.vars = elements[0].vars
        self._reducer = SpanReducer()
        for k, e in enumerate(elements):
            e._check(elements[0])
            if not self._reducer.add(e.coordinate_vector()):
                raise ValueError(f"element {k} ({e}) is linearly dependent on earlier ones")
        self.elements = elements
        self.structure = structure

    @property
    def dim(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def contains(self, X: VField) -> bool:
        return self._reducer.contains(X.coordinate_vector())

    def coordinates(self, X: VField) -> list[Fraction] | None:
        return self._reducer.coordinates(X.coordinate_vector())

    def coordinate_matrix(self) -> tuple[list, list[list[Fraction]]]:
        """(keys, rows): row ``k`` is element ``k`` over the monomial-component keys."""
        keys = sorted({key for e in self.elements for key in e.coordinate_vector()})
        rows = []
        for e in self.elements:
            v = e.coordinate_vector()
            rows.append([v.get(key, Fraction(0)) for key in keys])
        return keys, rows

    def combination(self, coords: Sequence) -> VField:
        out = VField.zero(self.vars)
        for c, e in zip(coords, self.elements):
            if c:
                out = out + e.scale(c)
        return out

    def __repr__(self) -> str:
        return f"LieBasis(dim={self.dim}, [{', '.join(str(e) for e in self.elements)}])"


def _closed_basis(elements: list[VField]) -> LieBasis:
    B = LieBasis(elements)
    return LieBasis(elements, structure_constants(B))


def lie_closure(generators: Sequence[VField], max_dim: int = 64, max_depth: int = 10) -> LieBasis:
    """Basis of the Lie algebra generated by ``generators``.

    Breadth-first: each round brackets every generator against the elements
    found in the previous round (``[g, e]``, elements outer, generators
    inner) and keeps the brackets independent of everything found so far.
    Stored elements are the raw brackets, not their remainders.
    """
    if not generators:
        raise ValueError("no generators")
    if max_dim < 1 or max_depth < 1:
        raise ValueError("max_dim and max_depth must be >= 1")
    red = SpanReducer()
    elements: list[VField] = []
    for g in generators:
        g._check(generators[0])
        if red.add(g.coordinate_vector()):
            elements.append(g)
    if not elements:
        raise ValueError("all generators vanish")
    if len(elements) > max_dim:
        raise DimensionExceeded(0, len(elements), "; generators exceed max_dim")
    frontier = list(elements)
    depth = 0
    while frontier:
        if depth >= max_depth:
            raise DimensionExceeded(depth, len(elements), "; max_depth reached")
        depth += 1
        new = []
        for e in frontier:
            for g in generators:
                b = lie_bracket(g, e)
                if b.is_zero():
                    continue
                if red.add(b.coordinate_vector()):
                    elements.append(b)
                    new.append(b)
                    if len(elements) > max_dim:
                        raise DimensionExceeded(depth, len(elements), "; max_dim exceeded")
        frontier = new
    return _closed_basis(elements)


def ideal_closure(L: LieBasis, drift: VField, controlled: Sequence[VField], max_dim: int = 64) -> LieBasis:
    """Basis of the ideal of ``L`` generated by ``controlled``.

    This is the smallest subalgebra containing the controlled fields and
    stable under ``ad(drift)``.  The span is found breadth-first; the basis
    handed back lists the controlled fields, then the elements of ``L`` that
    lie in the ideal (in ``L``'s order), then any bracket still needed.
    """
    for X in [drift, *controlled]:
        if not L.contains(X):
            raise ValueError(f"{X} is not in the span of L")
    letters = [drift, *controlled]
    red = SpanReducer()
    found: list[VField] = []
    for g in controlled:
        if red.add(g.coordinate_vector()):
            found.append(g)
    frontier = list(found)
    depth = 0
    while frontier:
        depth += 1
        new = []
        for e in frontier:
            for x in letters:
                b = lie_bracket(x, e)
                if not b.is_zero() and red.add(b.coordinate_vector()):
                    found.append(b)
                    new.append(b)
                    if len(found) > max_dim:
                        raise DimensionExceeded(depth, len(found), "; ideal exceeds max_dim")
        frontier = new
    # preferred basis order
    sel = SpanReducer()
    basis: list[VField] = []
    for cand in [*controlled, *L.elements, *found]:
        v = cand.coordinate_vector()
        if red.contains(v) and sel.add(v):
            basis.append(cand)
        if len(basis) == len(found):
            break
    B = _closed_basis(basis)
    for X in L.elements:
        for i, Y in enumerate(B.elements):
            if not B.contains(lie_bracket(X, Y)):
                raise NotClosed(-1, i)
    return B


def structure_constants(B: LieBasis) -> StructureTensor:
    d = B.dim
    c = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            coords = B.coordinates(lie_bracket(B[i], B[j]))
            if coords is None:
                raise NotClosed(i, j)
            for k, v in enumerate(coords):
                c[i][j][k] = v
                c[j][i][k] = -v
    return StructureTensor.from_nested(c)


def _point(B, p):
    p = tuple(p)
    if len(p) != len(B.vars):
        raise PolyError(f"point has {len(p)} coordinates, expected {len(B.vars)}")
    return p


def rank_at(B: LieBasis | Sequence[VField], p) -> int:
    elements = list(B)
    p = _point(elements[0], p)
    cols = [e(p) for e in elements]
    return rank([list(col) for col in cols])


@dataclass(frozen=True)
class GenericRank:
    rank: int
    constant: bool
    ranks: tuple[int, ...] = field(repr=False)
    points: tuple = field(repr=False, default=())

    @property
    def min_rank(self) -> int:
        return min(self.ranks)


def random_rational(rng: random.Random, bound: int = 100) -> Fraction:
    def nz():
        v = 0
        while v == 0:
            v = rng.randint(-bound, bound)
        return v

    return Fraction(nz(), nz())


def generic_rank(B: LieBasis | Sequence[VField], trials: int = 100, seed: int = 0,
                 include_origin: bool = True) -> GenericRank:
    """Largest sampled rank plus a constancy witness.

    Samples ``trials`` random rational points (numerators and denominators
    uniform in ``[-100, 100] \\ {0}``) from ``random.Random(seed)``; with
    ``include_origin`` the origin is sampled as well.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    elements = list(B)
    n = len(elements[0].vars)
    rng = random.Random(seed)
    pts = [tuple(random_rational(rng) for _ in range(n)) for _ in range(trials)]
    if include_origin:
        pts.append((Fraction(0),) * n)
    ranks = tuple(rank_at(elements, p) for p in pts)
    return GenericRank(max(ranks), len(set(ranks)) == 1, ranks, tuple(pts))


def drift_derivation(f: VField, B: LieBasis) -> DerivationMatrix:
    """Matrix of ``D = -ad(f)`` on ``span(B)``, Leibniz-checked exactly."""
    d = B.dim
    cols = []
    for j, X in enumerate(B.elements):
        img = -lie_bracket(f, X)
        coords = B.coordinates(img)
        if coords is None:
            raise NotNormalizing(j, -img)
        cols.append(coords)
    D = DerivationMatrix(d, tuple(tuple(cols[j][i] for j in range(d)) for i in range(d)))
    S = B.structure if B.structure is not None else structure_constants(B)
    defect = D.leibniz_defect(S)
    if defect != 0:  # pragma: no cover - impossible for a genuine bracket
        raise ArithmeticError(f"Leibniz identity fails with defect {defect}")
    return D


# ---------------------------------------------------------------------------
# low-dimensional identification


@dataclass(frozen=True)
class AlgebraTag:
    tag: str
    invariants: dict


def _span_dim(vectors) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


def _bracket_space(S: StructureTensor, A, B) -> list:
    out = [S.bracket(a, b) for a in A for b in B]
    return [v for v in out if any(v)]


def _basis_of(vectors) -> list:
    red = SpanReducer()
    out = []
    for v in vectors:
        if red.add({k: x for k, x in enumerate(v) if x}):
            out.append(list(v))
    return out


def killing_form(S: StructureTensor) -> list[list[Fraction]]:
    d = S.dim
    c = S.c
    # ad(X_i)[k][m] = c[i][m][k]; K_ij = tr(ad_i ad_j)
    return [
        [sum(c[i][m][k] * c[j][k][m] for k in range(d) for m in range(d)) for j in range(d)]
        for i in range(d)
    ]


def algebra_invariants(S: StructureTensor) -> dict:
    d = S.dim
    E = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    derived = [d]
    cur = E
    while cur and len(derived) < d + 2:
        cur = _basis_of(_bracket_space(S, cur, cur))
        derived.append(len(cur))
        if derived[-1] == derived[-2]:
            break
    lower = [d]
    cur = E
    while cur and len(lower) < d + 2:
        cur = _basis_of(_bracket_space(S, E, cur))
        lower.append(len(cur))
        if lower[-1] == lower[-2]:
            break
    # centre: null space of v -> ([e_i, v])_i
    rows = []
    for i in range(d):
        for k in range(d):
            rows.append([S.c[i][j][k] for j in range(d)])
    center = d - (rank(rows) if rows else 0)
    K = killing_form(S)
    pos, neg, zero = inertia(K)
    return {
        "dim": d,
        "derived_series": derived,
        "lower_central_series": lower,
        "center_dim": center,
        "killing_signature": (pos, neg, zero),
        "solvable": derived[-1] == 0,
        "nilpotent": lower[-1] == 0,
    }


def identify_algebra(S: StructureTensor) -> AlgebraTag:
    """Name a Lie algebra of dimension at most 3 from exact invariants.

    Tags: ``abelian``, ``heisenberg``, ``so3``, ``sl2``, ``solvable`` (for
    solvable non-nilpotent algebras) or ``unknown``.
    """
    inv = algebra_invariants(S)
    d = S.dim
    if d > 3:
        return AlgebraTag("unknown", inv)
    if inv["derived_series"][1] == 0:
        return AlgebraTag("abelian", inv)
    if inv["nilpotent"]:
        # the only non-abelian nilpotent algebra in dim <= 3
        return AlgebraTag("heisenberg", inv)
    if inv["solvable"]:
        return AlgebraTag("solvable", inv)
    if d == 3 and inv["derived_series"][1] == 3:
        pos, neg, zero = inv["killing_signature"]
        if neg == 3:
            return AlgebraTag("so3", inv)
        return AlgebraTag("sl2", inv)
    return AlgebraTag("unknown", inv)  # pragma: no cover
