"""Decision procedure: is a polynomial control-affine system equivalent to a
linear system on a Lie group or homogeneous space?

The procedure screens completeness of the system fields, checks the rank
condition for the full algebra ``L``, samples the rank of the ideal ``L0``
and looks for an equilibrium of the drift.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .liealg import (
    AlgebraTag,
    DerivationMatrix,
    DimensionExceeded,
    GenericRank,
    LieBasis,
    StructureTensor,
    VField,
    drift_derivation,
    generic_rank,
    ideal_closure,
    identify_algebra,
    lie_closure,
)
from .symexpr import Poly

__all__ = [
    "Completeness",
    "CompletenessResult",
    "SystemSpec",
    "Verdict",
    "ClassifyOptions",
    "ClassificationReport",
    "completeness_check",
    "find_drift_zero",
    "classify_system",
    "report_invariant_violations",
]


class Completeness(str, Enum):
    COMPLETE = "complete"
    LIKELY_INCOMPLETE = "likely-incomplete"
    UNKNOWN = "unknown"
    ASSERTED = "asserted-complete"


@dataclass(frozen=True)
class CompletenessResult:
    status: Completeness
    reason: str = ""
    witness: tuple | None = None
    blowup_time: float | None = None
    direction: int = 1

    def __str__(self):
        s = self.status.value
        if self.witness is not None:
            s += f" (witness {list(self.witness)}, blow-up near t={self.direction * self.blowup_time:.6g})"
        elif self.reason:
            s += f" ({self.reason})"
        return s


ESCAPE_GROWTH = 1e4


def _triangular_order(X: VField) -> list[str] | None:
    """Resolution order making the flow globally defined, or None.

    A component is resolvable once every variable it depends on, other than
    its own, is resolved and it is at most affine in its own variable; the
    flow is then obtained by solving linear scalar ODEs one after another.
    """
    resolved: list[str] = []
    pending = list(range(X.n))
    progress = True
    while pending and progress:
        progress = False
        for i in list(pending):
            v = X.vars[i]
            comp = X.components[i]
            others = comp.variables_used() - {v}
            if others <= set(resolved) and comp.degree_in(v) <= 1:
                resolved.append(v)
                pending.remove(i)
                progress = True
    return resolved if not pending else None


def _probe_points(n: int, samples: int, rng: np.random.Generator):
    pts = [np.ones(n), -np.ones(n)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        pts += [e, -e]
    while len(pts) < samples:
        pts.append(rng.normal(scale=2.0, size=n))
    return pts[:max(samples, 1)]


def completeness_check(X: VField, horizon: float = 10.0, samples: int = 16, seed: int = 0) -> CompletenessResult:
    """Screen a field for completeness.

    ``COMPLETE`` only under a sound sufficient condition (total degree at
    most one, or a triangular resolution order).  ``LIKELY_INCOMPLETE``
    carries an initial point whose adaptive integration, forward or
    backward, exceeds norm 1e12 before ``horizon``, or whose step size
    collapses after the norm grew by a factor 1e4.  Otherwise ``UNKNOWN``.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if all(c.degree() <= 1 for c in X.components):
        return CompletenessResult(Completeness.COMPLETE, "affine components")
    order = _triangular_order(X)
    if order is not None:
        return CompletenessResult(Completeness.COMPLETE, "triangular: " + " -> ".join(order))
    rng = np.random.default_rng(seed)
    packed = X.packed()
    for p in _probe_points(X.n, samples, rng):
        for direction, field_ in ((1, packed), (-1, packed.negated())):
            status, t, x = field_.adaptive(p, horizon)
            grown = np.linalg.norm(x) > ESCAPE_GROWTH * max(1.0, float(np.linalg.norm(p)))
            if status == 1 or (status == 2 and grown):
                return CompletenessResult(
                    Completeness.LIKELY_INCOMPLETE, "finite escape time",
                    tuple(float(v) for v in p), float(t), direction,
                )
    return CompletenessResult(Completeness.UNKNOWN, "no sufficient condition holds and no blow-up observed")


def _rational_roots_univariate(p: Poly, var: str) -> list[Fraction] | None:
    """Rational roots of a univariate polynomial of degree <= 2 (None if not applicable)."""
    i = p.vars.index(var)
    coeffs = {e[i]: c for e, c in p.items()}
    deg = max(coeffs, default=-1)
    if deg > 2:
        return None
    a, b, c = (coeffs.get(2, Fraction(0)), coeffs.get(1, Fraction(0)), coeffs.get(0, Fraction(0)))
    if deg <= 0:
        return [] if c else None
    if deg == 1:
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is None or rd is None:
        return []  # irrational roots have no rational representative
    r = Fraction(rn, rd)
    return sorted({(-b + r) / (2 * a), (-b - r) / (2 * a)})


def _isqrt_exact(k: int) -> int | None:
    from math import isqrt

    r = isqrt(k)
    return r if r * r == k else None


def find_drift_zero(f: VField, candidate=None, trials: int = 20, seed: int = 0):
    """An exactly verified zero of ``f`` as a tuple of Fractions, or None.

    A candidate that fails exact verification is dropped and the search
    runs.  None is a non-verdict: a zero may exist that the search missed.
    """
    if candidate is not None:
        cand = tuple(Fraction(c) for c in candidate)
        if all(v == 0 for v in f(cand)):
            return cand
    comps = [c for c in f.components if not c.is_zero()]
    if not comps:
        return (Fraction(0),) * f.n
    if any(c.is_constant() for c in comps):
        return None  # a nonzero constant component never vanishes
    # exact route: every nonzero component univariate with degree <= 2
    constraints: dict[str, set[Fraction]] = {}
    exact_ok = True
    for c in comps:
        used = c.variables_used()
        if len(used) != 1:
            exact_ok = False
            break
        (v,) = used
        roots = _rational_roots_univariate(c, v)
        if roots is None:
            exact_ok = False
            break
        s = set(roots)
        constraints[v] = constraints[v] & s if v in constraints else s
    if exact_ok:
        if any(not s for s in constraints.values()):
            return None
        pt = tuple(min(constraints[v], key=lambda r: (abs(r), r)) if v in constraints else Fraction(0)
                   for v in f.vars)
        return pt if all(val == 0 for val in f(pt)) else None
    return _newton_zero(f, trials, seed)


def _jacobian(f: VField):
    return [[c.diff(v) for v in f.vars] for c in f.components]


def _newton_zero(f: VField, trials: int, seed: int):
    from .kernels import PackedField

    J = _jacobian(f)
    Jp = [PackedField.from_polys(row) for row in J]
    fp = f.packed()
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = rng.normal(scale=2.0, size=f.n)
        for _it in range(100):
            F = fp(x)
            nF = np.linalg.norm(F)
            if not np.isfinite(nF):
                break
            if nF < 1e-13:
                break
            Jm = np.array([row(x) for row in Jp])
            step = np.linalg.lstsq(Jm, -F, rcond=None)[0]
            lam = 1.0
            while lam > 1e-6:
                xn = x + lam * step
                if np.linalg.norm(fp(xn)) < nF:
                    break
                lam *= 0.5
            x = xn
        for den in (1, 2, 3, 4, 6, 12, 100, 1000, 10**6):
            cand = tuple(Fraction(v).limit_denominator(den) for v in x)
            if all(val == 0 for val in f(cand)):
                return cand
    return None


@dataclass
class SystemSpec:
    vars: tuple
    drift: VField
    controls: list
    candidate_equilibrium: tuple | None = None
    assert_complete: frozenset = frozenset()

    def __post_init__(self):
        self.vars = tuple(self.vars)
        if not self.controls:
            raise ValueError("at least one control field is required")
        for X in [self.drift, *self.controls]:
            if X.vars != self.vars:
                raise ValueError(f"field {X} is over {X.vars}, system over {self.vars}")
        if self.candidate_equilibrium is not None and len(self.candidate_equilibrium) != len(self.vars):
            raise ValueError("equilibrium has the wrong dimension")
        self.assert_complete = frozenset(self.assert_complete)
        m = len(self.controls)
        for k in self.assert_complete:
            if not 0 <= k <= m:
                raise ValueError(f"assert_complete index {k} out of range 0..{m}")

    @property
    def n(self) -> int:
        return len(self.vars)

    @property
    def fields(self) -> list:
        """Drift first (index 0), then controls (indices 1..m)."""
        return [self.drift, *self.controls]


class Verdict(str, Enum):
    CASE_I = "Case_i_LinearOnHomogeneousSpace"
    CASE_II = "Case_ii_InvariantOnHomogeneousSpace"
    LINEAR_ON_GROUP = "LinearOnGroupCandidate"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ClassifyOptions:
    max_dim: int = 64
    max_depth: int = 10
    samples: int = 100
    horizon: float = 10.0
    seed: int = 0


@dataclass
class ClassificationReport:
    n: int
    verdict: Verdict
    reason: str = ""
    dim_L: int | None = None
    dim_L0: int | None = None
    L: LieBasis | None = None
    L0: LieBasis | None = None
    structure_L: StructureTensor | None = None
    structure_L0: StructureTensor | None = None
    derivation: DerivationMatrix | None = None
    rank_L: GenericRank | None = None
    rank_L0: GenericRank | None = None
    completeness: list = field(default_factory=list)
    drift_zero: tuple | None = None
    algebra: AlgebraTag | None = None
    unchecked_hypotheses: list = field(default_factory=list)
    advice: str = ""

    @property
    def verdict_label(self) -> str:
        if self.verdict is Verdict.INCONCLUSIVE:
            return f"Inconclusive({self.reason})"
        return self.verdict.value


def report_invariant_violations(r: ClassificationReport) -> list[str]:
    """Empty when the report is internally consistent."""
    bad = []
    if r.verdict in (Verdict.CASE_I, Verdict.LINEAR_ON_GROUP):
        if r.rank_L0 is None or not r.rank_L0.constant or r.rank_L0.rank != r.n:
            bad.append("Case_i needs constant rank(L0) = n")
    if r.verdict is Verdict.CASE_II:
        if r.rank_L0 is None or not r.rank_L0.constant or r.rank_L0.rank != r.n - 1:
            bad.append("Case_ii needs constant rank(L0) = n-1")
    if r.verdict is Verdict.LINEAR_ON_GROUP:
        if r.dim_L0 != r.n:
            bad.append("LinearOnGroupCandidate needs dim(L0) = n")
        if r.drift_zero is None:
            bad.append("LinearOnGroupCandidate needs a verified drift zero")
    if r.verdict is not Verdict.INCONCLUSIVE:
        if any(c.status is Completeness.LIKELY_INCOMPLETE or c.status is Completeness.UNKNOWN
               for c in r.completeness):
            bad.append("definitive verdict with an unscreened field")
        if r.rank_L is None or r.rank_L.min_rank != r.n:
            bad.append("definitive verdict without full rank of L")
    return bad


def classify_system(S: SystemSpec, opts: ClassifyOptions = ClassifyOptions()) -> ClassificationReport:
    n = S.n
    report = ClassificationReport(n=n, verdict=Verdict.INCONCLUSIVE)
    # completeness of the generators
    for k, X in enumerate(S.fields):
        if k in S.assert_complete:
            report.completeness.append(CompletenessResult(Completeness.ASSERTED, "asserted by user"))
        else:
            report.completeness.append(completeness_check(X, opts.horizon, seed=opts.seed + k))

    try:
        L = lie_closure(S.fields, opts.max_dim, opts.max_depth)
    except DimensionExceeded as exc:
        report.reason = "dimension"
        report.advice = str(exc)
        return report
    report.L, report.dim_L, report.structure_L = L, L.dim, L.structure
    L0 = ideal_closure(L, S.drift, S.controls, opts.max_dim)
    report.L0, report.dim_L0, report.structure_L0 = L0, L0.dim, L0.structure
    report.derivation = drift_derivation(S.drift, L0)
    report.algebra = identify_algebra(L0.structure)
    report.rank_L = generic_rank(L, opts.samples, opts.seed)
    report.rank_L0 = generic_rank(L0, opts.samples, opts.seed)
    report.drift_zero = find_drift_zero(S.drift, S.candidate_equilibrium, seed=opts.seed)

    statuses = [c.status for c in report.completeness]
    if Completeness.LIKELY_INCOMPLETE in statuses:
        report.reason = "completeness"
        k = statuses.index(Completeness.LIKELY_INCOMPLETE)
        report.advice = f"field {k} appears to escape in finite time"
        return report
    if Completeness.UNKNOWN in statuses:
        report.reason = "completeness"
        k = statuses.index(Completeness.UNKNOWN)
        report.advice = f"completeness of field {k} is undetermined; assert it to proceed"
        return report
    if report.rank_L.min_rank < n:
        report.reason = "transitivity"
        report.advice = (
            f"rank of L drops below {n} at a sampled point; restrict the system to an orbit "
            "(a connected submanifold) and re-run"
        )
        return report
    r0 = report.rank_L0
    if not r0.constant:
        report.reason = "hypothesis-violation"
        report.advice = f"sampled ranks of L0 vary: {sorted(set(r0.ranks))}"
        return report
    if r0.rank == n:
        if L0.dim == n and report.drift_zero is not None:
            report.verdict = Verdict.LINEAR_ON_GROUP
            report.unchecked_hypotheses.append("state manifold is simply connected")
        else:
            report.verdict = Verdict.CASE_I
    elif r0.rank == n - 1:
        report.verdict = Verdict.CASE_II
    else:
        report.reason = "hypothesis-violation"
        report.advice = f"rank of L0 is {r0.rank}, expected {n} or {n - 1}"
    return report
