"""Average-cost optimal control of switched Boolean control networks.

Rules compile to logical matrices, the reachable admissible transitions form
a weighted graph, and a minimum-mean cycle of that graph gives the optimal
long-run average cost together with a state-feedback law reaching it.
"""
__version__ = "0.1.0"

from .all_initial import AllStatesSolution, solve_all
from .io import load_model, load_problem
from .logic import LogicalMatrix, bits_to_index, index_to_bits, stp
from .mmc import MmcResult, karp_dp, min_mean, solve_mmc
from .model import (ConstraintSet, ProblemInstance, SbcnModel, TargetCost, augment_instance, quadratic_cost,
                    to_augmented_bcn)
from .ostg import InfeasibleError, Ostg, ValidationError, build_full_graph, build_ostg
from .policy import FeedbackLaw, certify_average, simulate, synthesize
from .rules import compile_rules, parse_rules

__all__ = [
    "AllStatesSolution", "ConstraintSet", "FeedbackLaw", "InfeasibleError", "LogicalMatrix", "MmcResult",
    "Ostg", "ProblemInstance", "SbcnModel", "TargetCost", "ValidationError", "augment_instance",
    "bits_to_index", "build_full_graph", "build_ostg", "certify_average", "compile_rules", "index_to_bits",
    "karp_dp", "load_model", "load_problem", "min_mean", "parse_rules", "quadratic_cost", "simulate",
    "solve_all", "solve_mmc", "stp", "synthesize", "to_augmented_bcn",
]
