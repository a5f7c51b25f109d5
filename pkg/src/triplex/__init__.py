"""Triples of Steiner triple systems sharing a flower: constructions and verifiers."""

from .core import (
    ClaimMismatch,
    DesignError,
    FlowerIntersectionCertificate,
    FlowerNotCommon,
    InvalidSystem,
    PairwiseMismatch,
    Permutation,
    TripleSystem,
    apply_permutation,
    flower_intersection_number,
    flower_of,
    one_factorize,
    three_way_common,
    validate_sts,
)
from .planner import PlanUnavailable, RealizationPlan, plan_and_realize

__all__ = [
    "ClaimMismatch",
    "DesignError",
    "FlowerIntersectionCertificate",
    "FlowerNotCommon",
    "InvalidSystem",
    "PairwiseMismatch",
    "Permutation",
    "PlanUnavailable",
    "RealizationPlan",
    "TripleSystem",
    "apply_permutation",
    "flower_intersection_number",
    "flower_of",
    "one_factorize",
    "plan_and_realize",
    "three_way_common",
    "validate_sts",
]
__version__ = "0.1.0"
