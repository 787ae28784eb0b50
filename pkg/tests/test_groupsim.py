import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lieequiv.groupsim import (
    GroupElement,
    GroupMismatch,
    LinearField,
    PiecewiseControl,
    Trajectory,
    affine_decompose,
    automorphism_residual,
    bourbaki_residual,
    catalog,
    derivation_exp_residual,
    expm,
    get_group,
    heisenberg_closed_form,
    heisenberg_coords,
    heisenberg_matrix,
    identity_tangent_map,
    linear_flow,
    projection_check,
    read_trajectory,
    simulate_linear_system,
    verification_suite,
    write_trajectory,
)

H3, SO3, SO4 = get_group("heisenberg3"), get_group("so3"), get_group("so4")


def rodrigues(w):
    th = np.linalg.norm(w)
    K = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]])
    if th == 0:
        return np.eye(3)
    return np.eye(3) + math.sin(th) / th * K + (1 - math.cos(th)) / th**2 * K @ K


class TestExpm:
    @given(arrays(float, 3, elements=st.floats(-6, 6)))
    def test_rodrigues(self, w):
        K = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]])
        assert np.allclose(expm(K), rodrigues(w), atol=1e-12)

    @pytest.mark.parametrize("scale", [1e-3, 0.1, 1.0, 5.0, 30.0])
    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_against_scipy(self, scale, n):
        A = np.random.default_rng(n).normal(size=(n, n)) * scale / n
        ref = scipy.linalg.expm(A)
        assert np.linalg.norm(expm(A) - ref) <= 1e-12 * max(1.0, np.linalg.norm(ref))

    @given(arrays(float, (3, 3), elements=st.floats(-3, 3)))
    def test_inverse(self, A):
        assert np.allclose(expm(A) @ expm(-A), np.eye(3), atol=1e-9)

    @given(arrays(float, (4, 4), elements=st.floats(-4, 4)))
    def test_skew_gives_orthogonal(self, A):
        Q = expm(A - A.T)
        assert np.allclose(Q.T @ Q, np.eye(4), atol=1e-12)
        assert np.linalg.det(Q) == pytest.approx(1.0, abs=1e-12)

    def test_nilpotent_exact(self):
        N = np.array([[0.0, 2.0, 3.0], [0.0, 0.0, 4.0], [0.0, 0.0, 0.0]])
        assert np.array_equal(expm(N), np.eye(3) + N + N @ N / 2)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            expm(np.zeros((2, 3)))


class TestCatalog:
    def test_structure_constants_are_lie(self):
        for G in catalog().values():
            c = G.vf_structure_constants()
            assert np.allclose(c, -np.transpose(c, (1, 0, 2)))

    def test_heisenberg_constants(self):
        c = H3.matrix_structure_constants()
        assert c[0, 1, 2] == pytest.approx(-1.0)  # [X, Y] = -Z for these matrices
        assert np.count_nonzero(np.round(c, 12)) == 2

    def test_aliases(self):
        assert get_group("SO(3)") is SO3 and get_group("heisenberg") is H3
        assert get_group("R2").tag == "abelian2"
        with pytest.raises(KeyError):
            get_group("sp4")

    def test_membership(self):
        with pytest.raises(ValueError):
            GroupElement(2 * np.eye(3), SO3)
        assert H3.membership_residual(heisenberg_matrix(1, 2, 3)) == 0
        assert np.array_equal(heisenberg_coords(heisenberg_matrix(1, 2, 3)), [1, 2, 3])

    def test_coords_round_trip(self):
        y = np.array([0.3, -1.0, 2.0, 0.5, 0.0, 1.5])
        assert np.allclose(SO4.coords(SO4.from_coords(y)), y)


class TestLinearFields:
    @pytest.mark.parametrize("G", [H3, SO3])
    def test_suite(self, G):
        worst = verification_suite(G, trials=40, seed=1)
        assert worst["automorphism"] <= 1e-9
        assert worst["identity"] <= 1e-12
        assert worst["group_law"] <= 1e-9
        assert worst["derivation_exp"] <= 1e-8
        assert worst["bourbaki"] <= 1e-9

    def test_coordinate_field_flow(self):
        F = LinearField.heisenberg_coordinate()
        M = heisenberg_matrix(2.0, 1.0, 0.5)
        assert np.allclose(heisenberg_coords(F.flow_matrix(3.0, M)), [2.0, 7.0, 6.5])

    def test_coordinate_field_vanishes_at_identity(self):
        assert not LinearField.heisenberg_coordinate().value(np.eye(3)).any()

    def test_tangent_map_is_exp_derivation(self):
        rng = np.random.default_rng(4)
        F = LinearField.inner(SO3, SO3.from_coords(rng.normal(size=3)))
        T = identity_tangent_map(F, 0.7)
        assert np.allclose(T, expm(0.7 * F.derivation), atol=1e-8)

    def test_inner_derivation_columns(self):
        X = SO3.algebra_basis[0]
        D = LinearField.inner(SO3, X).derivation
        # [L1, L2] = L3 and [L1, L3] = -L2
        assert np.allclose(D[:, 1], [0, 0, 1]) and np.allclose(D[:, 2], [0, -1, 0])

    def test_residuals_detect_a_non_automorphism(self):
        class Shear(LinearField):
            def flow_matrix(self, t, M):
                return np.asarray(M) + t * np.eye(3) * 0.1

        F = Shear(H3, "inner", np.zeros((3, 3)), np.zeros((3, 3)))
        M, N = H3.exp([1, 0, 0]), H3.exp([0, 1, 0])
        assert automorphism_residual(F, M, N, 1.0) > 1e-3

    def test_derivation_exp_input_check(self):
        with pytest.raises(ValueError):
            derivation_exp_residual(LinearField.heisenberg_coordinate(), [1.0, 2.0], 0.5)

    def test_group_mismatch(self):
        F = LinearField.heisenberg_coordinate()
        with pytest.raises(GroupMismatch):
            linear_flow(F, 1.0, SO3.identity())
        with pytest.raises(GroupMismatch):
            bourbaki_residual(F, H3.identity(), SO3.identity())
        with pytest.raises(GroupMismatch):
            LinearField.heisenberg_coordinate(SO3)


def _block_h():
    # so(3) acting on coordinates 2..4 of R^4
    return [SO4.algebra_basis[k] for k, name in enumerate(SO4.basis_names) if not name.startswith("A1")]


class TestProjection:
    @pytest.mark.parametrize("seed", range(10))
    def test_in_h_projects(self, seed):
        rng = np.random.default_rng(seed)
        h = _block_h()
        X = sum(c * B for c, B in zip(rng.normal(size=3), h))
        assert projection_check(X, h)

    @pytest.mark.parametrize("seed", range(10))
    def test_mixing_does_not_project(self, seed):
        rng = np.random.default_rng(seed)
        h = _block_h()
        X = SO4.from_coords(rng.normal(size=6))
        assert not projection_check(X, h)

    def test_sphere_criterion(self):
        # on S^2 = SO(3)/SO(2) with H fixing e1 the inner field ad X, X in h,
        # projects onto the flow of the invariant field alone
        rng = np.random.default_rng(2)
        e1 = np.array([1.0, 0.0, 0.0])
        X = 0.8 * SO3.algebra_basis[0]
        assert projection_check(X, [SO3.algebra_basis[0]])
        worst = 0.0
        for _ in range(20):
            M = SO3.random_element(rng).matrix
            t = rng.uniform(-2, 2)
            inner = linear_flow(LinearField.inner(SO3, X), t, GroupElement(M, SO3)).matrix @ e1
            invariant = expm(t * X) @ M @ e1
            worst = max(worst, np.linalg.norm(inner - invariant))
        assert worst <= 1e-8
        Y = SO3.algebra_basis[1]
        M = SO3.random_element(rng).matrix
        inner = LinearField.inner(SO3, Y).flow_matrix(1.0, M) @ e1
        assert np.linalg.norm(inner - expm(Y) @ M @ e1) > 1e-3

    def test_empty_h(self):
        assert projection_check(SO3.algebra_basis[0], [])


def test_affine_decompose():
    rng = np.random.default_rng(0)
    X, C = SO3.from_coords(rng.normal(size=3)), SO3.from_coords(rng.normal(size=3))

    def F_at(M):
        return X @ M - M @ X + M @ C

    lin, C2 = affine_decompose(F_at, SO3)
    assert np.allclose(C2, C)
    assert np.allclose(lin(np.eye(3)), 0)
    M = SO3.random_element(rng).matrix
    assert np.allclose(lin(M), X @ M - M @ X)


class TestSimulation:
    def test_heisenberg_closed_form(self):
        F = LinearField.heisenberg_coordinate()
        u = PiecewiseControl.parse("1@0.3;-2@0.4;0.5")
        grid = np.linspace(0, 1.5, 16)
        traj = simulate_linear_system(H3, F, [H3.algebra_basis[0]], u, grid)
        got = np.array([heisenberg_coords(M) for M in traj.states])
        assert np.max(np.abs(got - heisenberg_closed_form(u, grid))) <= 1e-12
        assert max(H3.membership_residual(M) for M in traj.states) == 0

    def test_so3_stays_on_group(self):
        F = LinearField.inner(SO3, SO3.algebra_basis[2])
        u = PiecewiseControl.constant([1.0, -0.5], 2)
        traj = simulate_linear_system(SO3, F, SO3.algebra_basis[:2], u, np.linspace(0, 5, 51))
        assert max(SO3.membership_residual(M) for M in traj.states) <= 1e-12

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            simulate_linear_system(H3, None, [H3.algebra_basis[0]], PiecewiseControl.constant(1.0), [0, 1, 1])

    def test_control_count(self):
        with pytest.raises(ValueError):
            simulate_linear_system(H3, None, [], PiecewiseControl.constant(1.0), [0, 1])


class TestControls:
    def test_parse_and_evaluate(self):
        u = PiecewiseControl.parse("1@0.5; -1@0.25; 2")
        assert u.switch_times() == [0.5, 0.75]
        assert [u(t)[0] for t in (0.1, 0.6, 0.8, 100.0)] == [1, -1, 2, 2]
        assert PiecewiseControl.parse(str(u)) == u

    def test_vector_pieces(self):
        u = PiecewiseControl.parse("1,2@1;0", m=2)
        assert u.m == 2 and list(u(0.5)) == [1, 2] and list(u(2)) == [0, 0]

    def test_intervals_cover(self):
        iv = PiecewiseControl.parse("1@0.5;-1@0.25").intervals(1.0)
        assert [(a, b) for a, b, _ in iv] == [(0.0, 0.5), (0.5, 0.75), (0.75, 1.0)]

    @pytest.mark.parametrize("spec", ["", "1@0", "1@-1", "a", "1;2@1", "1,2"])
    def test_errors(self, spec):
        with pytest.raises(ValueError):
            PiecewiseControl.parse(spec)


def test_trajectory_round_trip(tmp_path):
    F = LinearField.inner(SO3, SO3.algebra_basis[0])
    traj = simulate_linear_system(SO3, F, [SO3.algebra_basis[1]], PiecewiseControl.constant(0.3),
                                  np.linspace(0, 1, 11))
    path = tmp_path / "traj.csv"
    with open(path, "w") as fh:
        write_trajectory(traj, fh)
    with open(path) as fh:
        header, data = read_trajectory(fh)
    assert header[:3] == ["m11", "m12", "m13"] and len(header) == 9
    assert np.array_equal(data.reshape(-1, 3, 3), traj.states)


def test_vector_trajectory_names():
    text = write_trajectory(Trajectory(np.array([0.0]), np.array([[1.0, 2.0]])))
    assert text.splitlines()[0] == "s1,s2"
    header, data = read_trajectory(io.StringIO(text))
    assert data.tolist() == [[1.0, 2.0]]
