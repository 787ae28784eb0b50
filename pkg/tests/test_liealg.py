from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lieequiv.liealg import (
    DimensionExceeded,
    LieBasis,
    NotClosed,
    NotNormalizing,
    StructureTensor,
    VField,
    algebra_invariants,
    drift_derivation,
    generic_rank,
    ideal_closure,
    identify_algebra,
    killing_form,
    lie_bracket,
    lie_closure,
    rank_at,
    structure_constants,
)
from lieequiv.symexpr import Poly

from conftest import polys

V2 = ("x", "y")
V3 = ("x", "y", "z")


def vf(vars, *comps):
    return VField.parse(vars, list(comps))


def fields(vars=V2, max_deg=2):
    return st.lists(polys(vars, max_deg, 3), min_size=len(vars), max_size=len(vars)).map(
        lambda cs: VField(vars, cs))


def heisenberg():
    return vf(V2, "y^2", "0"), vf(V2, "0", "1")


class TestBracket:
    def test_heisenberg_brackets(self):
        f, g1 = heisenberg()
        g2 = lie_bracket(g1, f)
        assert str(g2) == "2*y ∂/∂x"
        assert lie_bracket(g1, g2) == vf(V2, "2", "0")

    @given(fields(), fields())
    def test_antisymmetry(self, X, Y):
        assert lie_bracket(X, Y) == -lie_bracket(Y, X)

    @given(fields(max_deg=2), fields(max_deg=2), fields(max_deg=2))
    def test_jacobi(self, X, Y, Z):
        J = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
             + lie_bracket(Z, lie_bracket(X, Y)))
        assert J.is_zero()

    @given(fields(), fields(), st.fractions(-3, 3, max_denominator=4))
    def test_bilinear(self, X, Y, c):
        Z = vf(V2, "x*y", "1")
        assert lie_bracket(X.scale(c) + Z, Y) == lie_bracket(X, Y).scale(c) + lie_bracket(Z, Y)

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_difference_commutator(self, seed):
        # [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i : compare against central differences
        rng = np.random.default_rng(seed)
        X = VField(V3, [Poly(V3, {tuple(rng.integers(0, 3, 3)): int(rng.integers(-3, 4))}) for _ in V3])
        Y = VField(V3, [Poly(V3, {tuple(rng.integers(0, 3, 3)): int(rng.integers(-3, 4)),
                                  (0, 0, 0): 1}) for _ in V3])
        p = rng.uniform(-1, 1, 3)
        h = 1e-6

        def jac(F):
            return np.array([(F.at_float(p + h * e) - F.at_float(p - h * e)) / (2 * h) for e in np.eye(3)]).T

        fd = jac(Y) @ X.at_float(p) - jac(X) @ Y.at_float(p)
        assert np.allclose(lie_bracket(X, Y).at_float(p), fd, atol=1e-7)

    def test_mismatched_variables(self):
        with pytest.raises(ValueError):
            lie_bracket(vf(V2, "x", "y"), vf(("x",), "x"))


class TestVField:
    def test_exact_evaluation(self):
        X = vf(V2, "y^2", "1/2*x")
        assert X((Fraction(1, 2), 3)) == (9, Fraction(1, 4))

    def test_printing(self):
        assert str(vf(V2, "x + y", "-1")) == "(x + y) ∂/∂x - ∂/∂y"
        assert str(VField.zero(V2)) == "0"

    def test_wrong_component_count(self):
        with pytest.raises(ValueError):
            vf(V2, "x")


class TestClosure:
    def test_heisenberg_closure(self):
        f, g = heisenberg()
        L = lie_closure([f, g])
        assert L.dim == 4
        assert [str(X) for X in L] == ["y^2 ∂/∂x", "∂/∂y", "2*y ∂/∂x", "2 ∂/∂x"]
        L0 = ideal_closure(L, f, [g])
        assert [str(X) for X in L0] == ["∂/∂y", "2*y ∂/∂x", "2 ∂/∂x"]

    @pytest.mark.parametrize("d", range(1, 7))
    def test_p_of_y_family(self, d):
        f, g = vf(V2, f"y^{d}", "0"), vf(V2, "0", "1")
        L = lie_closure([f, g])
        L0 = ideal_closure(L, f, [g])
        assert (L.dim, L0.dim) == (d + 2, d + 1)

    def test_dimension_exceeded(self):
        f, g = vf(V2, "x^2*y", "0"), vf(V2, "0", "x^3")
        with pytest.raises(DimensionExceeded) as exc:
            lie_closure([f, g], max_dim=8)
        assert exc.value.dim > 8 or exc.value.depth >= 1

    def test_depth_exceeded(self):
        with pytest.raises(DimensionExceeded):
            lie_closure([vf(("x",), "1"), vf(("x",), "x^3")], max_depth=2)

    def test_closure_contains_generators_and_is_closed(self):
        L = lie_closure([vf(("x",), "1"), vf(("x",), "x^2")])
        assert L.dim == 3
        for X in L:
            for Y in L:
                assert L.contains(lie_bracket(X, Y))

    def test_ideal_property(self):
        f, g = heisenberg()
        L = lie_closure([f, g])
        L0 = ideal_closure(L, f, [g])
        for X in L:
            for Y in L0:
                assert L0.contains(lie_bracket(X, Y))

    def test_not_closed_basis(self):
        with pytest.raises(NotClosed):
            structure_constants(LieBasis([vf(("x",), "1"), vf(("x",), "x^2")]))


class TestStructure:
    def test_heisenberg_constant(self):
        f, g = heisenberg()
        L0 = ideal_closure(lie_closure([f, g]), f, [g])
        S = L0.structure
        assert S.c[0][1][2] == 1
        nonzero = [(i, j, k) for i in range(3) for j in range(3) for k in range(3) if S.c[i][j][k]]
        assert sorted(nonzero) == [(0, 1, 2), (1, 0, 2)]
        assert S.jacobi_defect() == 0 and S.antisymmetry_defect() == 0

    def test_so3_epsilon(self):
        # fields x -> -L_i x bracket like the matrices L_i
        X = [vf(V3, "0", "z", "-y"), vf(V3, "-z", "0", "x"), vf(V3, "y", "-x", "0")]
        S = structure_constants(LieBasis(X))
        eps = np.zeros((3, 3, 3))
        for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
            eps[i, j, k], eps[j, i, k] = 1, -1
        assert np.array_equal(S.as_float(), eps)
        assert identify_algebra(S).tag == "so3"

    def test_jacobi_defect_detected(self):
        # [e1, e2] = e3, [e1, e3] = e3, [e2, e3] = e1 is antisymmetric but not Lie
        c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
        for i, j, k in [(0, 1, 2), (0, 2, 2), (1, 2, 0)]:
            c[i][j][k], c[j][i][k] = 1, -1
        bad = StructureTensor.from_nested(c)
        assert bad.antisymmetry_defect() == 0
        assert bad.jacobi_defect() == 1

    def test_antisymmetry_defect_detected(self):
        bad = StructureTensor.from_nested([[[1]]])
        assert bad.antisymmetry_defect() == 2


class TestRank:
    def test_generic_rank_heisenberg(self):
        f, g = heisenberg()
        L0 = ideal_closure(lie_closure([f, g]), f, [g])
        gr = generic_rank(L0, trials=100)
        assert gr.rank == 2 and gr.constant and len(gr.ranks) == 101

    def test_rank_drop_at_origin(self):
        B = [vf(V2, "y", "0")]
        assert not generic_rank(B, trials=30).constant
        assert generic_rank(B, trials=30, include_origin=False).constant
        assert rank_at(B, (0, 0)) == 0 and rank_at(B, (0, 1)) == 1

    def test_rank_dimension_mismatch(self):
        with pytest.raises(ValueError):
            rank_at([vf(V2, "1", "0")], (0,))


class TestDerivation:
    def test_heisenberg_derivation(self):
        f, g = heisenberg()
        L0 = ideal_closure(lie_closure([f, g]), f, [g])
        D = drift_derivation(f, L0)
        assert D.column(0) == [0, 1, 0]
        assert D.column(1) == [0, 0, 0] and D.column(2) == [0, 0, 0]
        assert D.leibniz_defect(L0.structure) == 0

    def test_not_normalizing(self):
        with pytest.raises(NotNormalizing):
            drift_derivation(vf(V2, "0", "x^2"), LieBasis([vf(V2, "1", "0")]))

    def test_inner_derivation_so3(self):
        X = [vf(V3, "0", "z", "-y"), vf(V3, "-z", "0", "x"), vf(V3, "y", "-x", "0")]
        B = LieBasis(X)
        D = drift_derivation(X[0], B)
        assert D.leibniz_defect(structure_constants(B)) == 0
        assert D.column(0) == [0, 0, 0]


class TestIdentify:
    @pytest.mark.parametrize(
        "gens, tag",
        [
            ([vf(("x",), "1"), vf(("x",), "x"), vf(("x",), "x^2")], "sl2"),
            ([vf(V2, "1", "0"), vf(V2, "0", "1")], "abelian"),
            ([vf(("x",), "1"), vf(("x",), "x")], "solvable"),
            ([vf(V2, "0", "1"), vf(V2, "y", "0")], "heisenberg"),
        ],
    )
    def test_tags(self, gens, tag):
        assert identify_algebra(lie_closure(gens).structure).tag == tag

    def test_killing_form_so3_negative_definite(self):
        X = [vf(V3, "0", "z", "-y"), vf(V3, "-z", "0", "x"), vf(V3, "y", "-x", "0")]
        K = killing_form(structure_constants(LieBasis(X)))
        assert K == [[-2, 0, 0], [0, -2, 0], [0, 0, -2]]

    def test_invariants_heisenberg(self):
        inv = algebra_invariants(lie_closure([vf(V2, "0", "1"), vf(V2, "y", "0")]).structure)
        assert inv["dim"] == 3


@pytest.mark.parametrize("seed", range(4))
def test_flow_commutator_is_third_order(seed):
    # phi^Y_-h phi^X_-h phi^Y_h phi^X_h (p) = p + h^2 [X, Y](p) + O(h^3)
    rng = np.random.default_rng(seed)
    X = VField.parse(V2, ["y^2 - x", "x*y + 1"])
    Y = VField.parse(V2, ["1 + x^2", "-y^3"])
    p = rng.uniform(-0.5, 0.5, 2)
    B = lie_bracket(X, Y).at_float(p)
    Xp, Yp = X.packed(), Y.packed()
    res = []
    for h in (1e-2, 1e-3):
        q = p
        for F, s in ((Xp, h), (Yp, h), (Xp, -h), (Yp, -h)):
            q = F.flow(q, s, h / 40)
        res.append(np.linalg.norm(q - p - h * h * B))
    assert 500 < res[0] / res[1] < 2000
