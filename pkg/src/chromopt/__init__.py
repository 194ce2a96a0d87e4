"""Maximizing q-colorings at a fixed edge density: the weighted-subset program, its closed form near density 1/4, and exact graph-side checks."""

from chromopt._validation import DomainError, InconsistencyError
from chromopt._version import __version__
from chromopt.analysis import LemmaCheckResult, closed_form_value
from chromopt.coloring import (
    IntPoly,
    chromatic_polynomial,
    construction_lower_bound,
    count_colorings_bruteforce,
    count_colorings_multipartite,
    fl_upper_bound,
)
from chromopt.extremal import SearchResult, enumerate_graphs, search_extremal, verify_conjecture_instance
from chromopt.graphs import (
    Graph,
    classify_support,
    construct_g_alpha,
    edge_count_bound_check,
    edit_distance_labeled,
    max_bipartition,
    support_graph,
    turan,
)
from chromopt.opt_core import FeasibleVector, ProblemInstance, e_value, is_feasible, obj_value, v_value
from chromopt.solver import (
    AnalyticOptSolver,
    NumericOptSolver,
    OptReport,
    RestrictedOptSolver,
    analytic_opt,
    enumerate_candidate_supports,
    numeric_opt,
    solve_restricted,
)
from chromopt.subsetspace import ColorSet, PartitionSpec
from chromopt.supports import SupportSpec

__all__ = [
    "AnalyticOptSolver", "ColorSet", "DomainError", "FeasibleVector", "Graph", "InconsistencyError", "IntPoly",
    "LemmaCheckResult", "NumericOptSolver", "OptReport", "PartitionSpec", "ProblemInstance", "RestrictedOptSolver",
    "SearchResult", "SupportSpec", "__version__", "analytic_opt", "chromatic_polynomial", "classify_support",
    "closed_form_value", "construct_g_alpha", "construction_lower_bound", "count_colorings_bruteforce",
    "count_colorings_multipartite", "e_value", "edge_count_bound_check", "edit_distance_labeled",
    "enumerate_candidate_supports", "enumerate_graphs", "fl_upper_bound", "is_feasible", "max_bipartition",
    "numeric_opt", "obj_value", "search_extremal", "solve_restricted", "support_graph", "turan", "v_value",
    "verify_conjecture_instance",
]
