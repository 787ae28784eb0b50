"""Exact linear algebra over the rationals (Fraction entries)."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence


class SpanReducer:
    """Incremental reduced row echelon form over sparse rational vectors.

    Vectors are dicts ``key -> Fraction`` over an arbitrary totally ordered
    key set.  Each inserted independent vector becomes basis element ``i``;
    every stored row carries its expression in terms of those elements so
    membership tests also return coordinates.
    """

    def __init__(self):
        self._rows: dict[Hashable, tuple[dict, dict[int, Fraction]]] = {}
        self.size = 0

    def _reduce(self, vec: Mapping) -> tuple[dict, dict[int, Fraction]]:
        v = {k: Fraction(c) for k, c in vec.items() if c}
        combo: dict[int, Fraction] = {}
        for piv in [k for k in v if k in self._rows]:
            c = v.get(piv)
            if not c:
                continue
            row, rcombo = self._rows[piv]
            for k, a in row.items():
                nv = v.get(k, 0) - c * a
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for i, a in rcombo.items():
                combo[i] = combo.get(i, 0) + c * a
        return v, {i: a for i, a in combo.items() if a}

    def remainder(self, vec: Mapping) -> dict:
        return self._reduce(vec)[0]

    def contains(self, vec: Mapping) -> bool:
        return not self._reduce(vec)[0]

    def coordinates(self, vec: Mapping) -> list[Fraction] | None:
        """Coordinates over the inserted elements, or None if outside the span."""
        rem, combo = self._reduce(vec)
        if rem:
            return None
        return [combo.get(i, Fraction(0)) for i in range(self.size)]

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec``; returns False (and stores nothing) if dependent."""
        rem, combo = self._reduce(vec)
        if not rem:
            return False
        idx = self.size
        # rem = vec - sum(combo_i * e_i), so rem in basis terms is e_idx - combo
        rcombo = {i: -a for i, a in combo.items()}
        rcombo[idx] = Fraction(1)
        piv = min(rem)
        p = rem[piv]
        row = {k: a / p for k, a in rem.items()}
        rcombo = {i: a / p for i, a in rcombo.items()}
        for key, (orow, ocombo) in self._rows.items():
            c = orow.get(piv)
            if not c:
                continue
            for k, a in row.items():
                nv = orow.get(k, 0) - c * a
                if nv:
                    orow[k] = nv
                else:
                    orow.pop(k, None)
            for i, a in rcombo.items():
                nv = ocombo.get(i, 0) - c * a
                if nv:
                    ocombo[i] = nv
                else:
                    ocombo.pop(i, None)
        self._rows[piv] = (row, rcombo)
        self.size += 1
        return True


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a dense matrix given as a list of rows."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    n_cols = len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                f = f / p
                mi, mr = m[i], m[r]
                for j in range(c, n_cols):
                    mi[j] -= f * mr[j]
        r += 1
        if r == len(m):
            break
    return r


def inertia(sym: Sequence[Sequence]) -> tuple[int, int, int]:
    """(n_pos, n_neg, n_zero) of a symmetric rational matrix.

    Symmetric Gaussian elimination (congruence), so Sylvester's law of
    inertia applies; a zero pivot with a nonzero off-diagonal entry is
    handled by the ``e_i + e_j`` congruence.
    """
    a = [[Fraction(x) for x in r] for r in sym]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        i = next((k for k in active if a[k][k]), None)
        if i is None:
            pair = next(
                ((k, l) for k in active for l in active if k != l and a[k][l]), None
            )
            if pair is None:
                break
            k, l = pair
            # row/col k += row/col l
            for j in range(n):
                a[k][j] += a[l][j]
            for j in range(n):
                a[j][k] += a[j][l]
            continue
        p = a[i][i]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(i)
        for k in active:
            f = a[k][i] / p
            if f:
                for j in active:
                    a[k][j] -= f * a[i][j]
        for k in active:
            a[k][i] = a[i][k] = Fraction(0)
    return pos, neg, n - pos - neg


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]
