from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from lieequiv.symexpr import Poly

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ROOT / "systems"

VARS = ("x", "y", "z")


def polys(vars=VARS, max_deg=3, max_terms=4):
    n = len(vars)
    exps = st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple)
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return st.dictionaries(exps, coef, max_size=max_terms).map(lambda t: Poly(vars, t))


def points(n):
    return st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=n, max_size=n)


@pytest.fixture
def systems_dir():
    return SYSTEMS


@pytest.fixture
def F():
    return Fraction


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
