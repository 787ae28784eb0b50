"""Exact Lie-algebraic classification of polynomial control-affine systems
and numerical verification on catalog matrix groups."""

__version__ = "0.1.0"

from .symexpr import Poly, ParseError, PolyError, parse_polynomial, partial_derivative, evaluate  # noqa: E402
from .liealg import (  # noqa: E402
    VField,
    LieBasis,
    StructureTensor,
    DerivationMatrix,
    lie_bracket,
    lie_closure,
    ideal_closure,
    structure_constants,
    generic_rank,
    drift_derivation,
    identify_algebra,
)
from .classify import SystemSpec, ClassifyOptions, Verdict, classify_system, completeness_check  # noqa: E402
from .groupsim import GroupModel, LinearField, PiecewiseControl, catalog, expm, get_group  # noqa: E402
from .equivmap import EquivalenceProbe, FlowWord, heisenberg_equivalence_demo, heisenberg_probe  # noqa: E402
