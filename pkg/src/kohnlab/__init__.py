"""Exact symbolic tools for finite type and subelliptic multipliers on polynomial model domains."""

from .boundary import BoundarySystem, FieldList, build_boundary_system, list_eval, point3_check
from .dangelo import HoloCurve, TypeEstimate, dangelo_type, pullback_order
from .estimators import CommutatorMultitype, DAngeloType, KohnAlgorithm, check_hpoly, check_point
from .fields import VectorField10, lie_bracket
from .forms import PForm, del_, delbar, deldelbar, levi_minors, wedge
from .kohn import Multiplier, MultiplierIdeal, Trace, gain_of, run
from .multitype import Weight, commutator_multitype, enumerate_weights, is_weight, n_bound
from .poly import CPoint, GaussianRational, HPoly, parse_poly

__version__ = "0.1.0"

__all__ = [
    "BoundarySystem",
    "CPoint",
    "CommutatorMultitype",
    "DAngeloType",
    "FieldList",
    "GaussianRational",
    "HPoly",
    "HoloCurve",
    "KohnAlgorithm",
    "Multiplier",
    "MultiplierIdeal",
    "PForm",
    "Trace",
    "TypeEstimate",
    "VectorField10",
    "Weight",
    "build_boundary_system",
    "check_hpoly",
    "check_point",
    "commutator_multitype",
    "dangelo_type",
    "del_",
    "delbar",
    "deldelbar",
    "enumerate_weights",
    "gain_of",
    "is_weight",
    "levi_minors",
    "lie_bracket",
    "list_eval",
    "n_bound",
    "parse_poly",
    "point3_check",
    "pullback_order",
    "run",
    "wedge",
]
