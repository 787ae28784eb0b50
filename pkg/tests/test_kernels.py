import numpy as np
import pytest

from lieequiv import kernels
from lieequiv.kernels import IntegrationError, PackedField, backend_module
from lieequiv.liealg import VField

try:
    backend_module("compiled")
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels not built")

V3 = ("x", "y", "z")


def field(*comps):
    return VField.parse(V3, list(comps)).packed()


F = field("y*z - x^2", "x + 1/2*z^3", "-y + x*y*z")


def test_eval_matches_exact():
    p = np.array([0.3, -0.7, 1.1])
    X = VField.parse(V3, ["y*z - x^2", "x + 1/2*z^3", "-y + x*y*z"])
    assert np.allclose(F(p, "python"), [float(v) for v in X(tuple(p))], rtol=1e-14)


@needs_compiled
@pytest.mark.parametrize("seed", range(3))
def test_eval_parity(seed):
    p = np.random.default_rng(seed).normal(size=3)
    assert np.allclose(F(p, "compiled"), F(p, "python"), rtol=1e-14, atol=1e-15)


@needs_compiled
def test_flow_and_path_parity():
    x0 = np.array([0.1, 0.2, -0.3])
    a, b = F.flow(x0, 0.7, 1e-2, "compiled"), F.flow(x0, 0.7, 1e-2, "python")
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    pa, pb = F.path(x0, 1e-2, 50, "compiled"), F.path(x0, 1e-2, 50, "python")
    assert pa.shape == (51, 3) and np.allclose(pa, pb, rtol=1e-12, atol=1e-14)


@needs_compiled
def test_adaptive_parity():
    G = VField.parse(("x",), ["x^2"]).packed()
    for name in ("compiled", "python"):
        status, t, _ = G.adaptive(np.array([1.0]), 10.0, backend=name)
        assert status == 1 and t == pytest.approx(1.0, abs=1e-3)


def test_linear_flow_accuracy():
    # x' = y, y' = -x: rotation
    R = VField.parse(("x", "y"), ["y", "-x"]).packed()
    out = R.flow(np.array([1.0, 0.0]), np.pi / 2, 1e-3)
    assert np.allclose(out, [0.0, -1.0], atol=1e-12)


def test_negated_runs_backward():
    x0 = np.array([0.1, 0.2, -0.3])
    there = F.flow(x0, 0.5)
    assert np.allclose(F.negated().flow(there, 0.5), x0, atol=1e-11)


def test_adaptive_reaches_horizon():
    R = VField.parse(("x", "y"), ["y", "-x"]).packed()
    status, t, x = R.adaptive(np.array([1.0, 0.0]), 5.0)
    assert status == 0 and t == pytest.approx(5.0)
    assert np.allclose(x, [np.cos(5.0), -np.sin(5.0)], atol=1e-7)


def test_blow_up_raises():
    G = VField.parse(("x",), ["x^2"]).packed()
    with pytest.raises(IntegrationError):
        G.flow(np.array([1.0]), 2.0, 1e-2)


def test_combination_packing():
    f = VField.parse(("x", "y"), ["y^2", "0"])
    g = VField.parse(("x", "y"), ["0", "1"])
    P = PackedField.from_polys([list(f.components), list(g.components)], [1.0, -2.0])
    assert np.allclose(P(np.array([0.0, 3.0])), [9.0, -2.0])


def test_backend_names():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        backend_module("fortran")


def test_env_forces_fallback():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "import lieequiv.kernels as k; print(k.BACKEND)"],
        env={"LIEEQUIV_PURE_PYTHON": "1", "PATH": "/usr/bin"},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
