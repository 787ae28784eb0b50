import numpy as np
import pytest

from lieequiv.equivmap import (
    EquivalenceProbe,
    FlowWord,
    flow_word_group,
    flow_word_state,
    heisenberg_equivalence_demo,
    heisenberg_probe,
    manufactured_word_pair,
    pushforward_residual,
    simulate_control_affine,
    so3_probe,
    well_definedness_residual,
)
from lieequiv.groupsim import PiecewiseControl, get_group
from lieequiv.liealg import VField


class TestFlowWords:
    def test_order_of_letters(self):
        P = heisenberg_probe()
        w = FlowWord([(0, 1.0), (1, 1.0)])
        # d/dy for 1 then 2y d/dx for 1 from the origin
        assert np.allclose(flow_word_state(P, w), [2.0, 1.0])
        assert np.allclose(flow_word_group(P, w), [[1, 1, 1], [0, 1, 1], [0, 0, 1]])

    def test_inverse_returns_home(self):
        P = so3_probe()
        w = FlowWord([(0, 0.4), (2, -1.1), (1, 0.7)])
        assert np.allclose(flow_word_state(P, w + w.inverse()), P.base_point, atol=1e-10)
        assert np.allclose(flow_word_group(P, w + w.inverse()), np.eye(3), atol=1e-12)

    def test_bad_index(self):
        with pytest.raises(IndexError):
            flow_word_state(heisenberg_probe(), FlowWord([(3, 1.0)]))


class TestProbe:
    def test_structure_must_match(self):
        v = ("x", "y")
        wrong = [VField.parse(v, ["0", "1"]), VField.parse(v, ["y", "0"]), VField.parse(v, ["2", "0"])]
        with pytest.raises(ValueError, match="structure constants"):
            EquivalenceProbe(np.zeros(2), wrong, get_group("heisenberg3"))

    def test_dimension_checks(self):
        P = heisenberg_probe()
        with pytest.raises(ValueError):
            EquivalenceProbe(np.zeros(2), P.basis[:2], P.group)
        with pytest.raises(ValueError):
            EquivalenceProbe(np.zeros(3), P.basis, P.group)

    @pytest.mark.parametrize("make", [heisenberg_probe, so3_probe])
    def test_well_definedness(self, make):
        P = make()
        rng = np.random.default_rng(0)
        for _ in range(10):
            w1, w2 = manufactured_word_pair(P, rng)
            r = well_definedness_residual(P, w1, w2)
            assert r is not None and r <= 1e-5

    def test_commutator_word_reaches_centre(self):
        P = heisenberg_probe()
        a, b = 0.7, 1.3
        w1 = FlowWord([(2, a * b)])
        w2 = FlowWord([(0, a), (1, b), (0, -a), (1, -b)])
        assert well_definedness_residual(P, w1, w2) <= 1e-12

    def test_not_comparable(self):
        P = heisenberg_probe()
        assert well_definedness_residual(P, FlowWord([(0, 1.0)]), FlowWord([(1, 1.0)])) is None

    @pytest.mark.parametrize("make", [heisenberg_probe, so3_probe])
    def test_pushforward(self, make):
        P = make()
        rng = np.random.default_rng(1)
        for _ in range(10):
            w = FlowWord([(int(rng.integers(3)), float(rng.uniform(-1, 1))) for _ in range(3)])
            assert pushforward_residual(P, w, int(rng.integers(3))) <= 1e-5

    def test_forward_differences_are_first_order(self):
        P = so3_probe()
        w = FlowWord([(0, 0.3), (1, -0.6)])
        r1 = pushforward_residual(P, w, 2, h=1e-2, scheme="forward")
        r2 = pushforward_residual(P, w, 2, h=1e-3, scheme="forward")
        assert 5 < r1 / r2 < 20

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            pushforward_residual(heisenberg_probe(), FlowWord(), 0, scheme="backward")


class TestDemo:
    def test_constant_control(self):
        rep = heisenberg_equivalence_demo(PiecewiseControl.constant(1.0), 1.0)
        assert rep.passed and rep.max_deviation <= 1e-9 and rep.closed_form_deviation <= 1e-9
        assert np.allclose(rep.sigma[-1], [1 / 3, 1], atol=1e-12)
        assert np.allclose(rep.mapped[-1], [1 / 3, 1], atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_piecewise(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 5))
        spec = ";".join(f"{rng.uniform(-2, 2):.6f}@{rng.uniform(0.1, 0.6):.6f}" for _ in range(k))
        rep = heisenberg_equivalence_demo(PiecewiseControl.parse(spec), 1.5)
        assert rep.passed and rep.closed_form_deviation <= 1e-6

    def test_report_texts(self):
        rep = heisenberg_equivalence_demo(PiecewiseControl.constant(1.0), 0.5, dt=0.01)
        table = rep.table(every=10)
        assert table.splitlines()[0].split()[:3] == ["t", "x", "y"]
        assert len(table.splitlines()) == 1 + 6
        assert set(rep.summary()) == {"max_deviation", "closed_form_deviation", "tol", "pass"}

    def test_simulate_validation(self):
        f, g = VField.parse(("x",), ["0"]), VField.parse(("x",), ["1"])
        with pytest.raises(ValueError):
            simulate_control_affine(f, [g, g], PiecewiseControl.constant(1.0), 1.0, [0.0])
        with pytest.raises(ValueError):
            simulate_control_affine(f, [g], PiecewiseControl.constant(1.0), 0.0, [0.0])

    def test_switch_alignment(self):
        f, g = VField.parse(("x",), ["0"]), VField.parse(("x",), ["1"])
        t, x = simulate_control_affine(f, [g], PiecewiseControl.parse("1@0.35;-1"), 1.0, [0.0], dt=0.1)
        assert np.any(np.isclose(t, 0.35))
        assert x[-1, 0] == pytest.approx(0.35 - 0.65)
