"""Approximating Maximum Independent Set parameterized by the width of a
given tree decomposition, with every decomposition transform, the
pathwidth subroutine, pluggable black-box approximators, and exact oracles
for desk-scale verification.
"""
from .graphcore import (Graph, GraphParseError, connected_components, format_pace_gr,
                        gen_interval_graph, gen_partial_ktree, induced_subgraph,
                        is_independent_set, parse_graph)
from .decomp import (InvalidDecompositionError, PathDecomposition, TreeDecomposition,
                     ValidationReport, branch_bag_union, chop_subtrees,
                     contract_to_branch_td, make_leaf_unique, make_nice,
                     make_nice_path, nice_kinds, path_decomp_minus_Q, read_td,
                     reduce_depth, validate_pd, validate_td, write_td)
from .solvers import (BlackBox, BudgetExceededError, IndependentSetResult,
                      box_clique_removal, box_exact, exact_mis_bruteforce,
                      exact_mis_td_dp, greedy_degeneracy)
from .pwapx import (BlockPartition, LevelPartition, approx_level, approx_pw,
                    block_partition, level_partition, vertex_lengths)
from .twapx import (ComponentRecord, PipelineTrace, approx_component, approx_tw,
                    leaf_unique_candidate, level_split_Q)
from .audit import AuditCheck, run_audits

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphParseError", "connected_components", "format_pace_gr",
    "gen_interval_graph", "gen_partial_ktree", "induced_subgraph",
    "is_independent_set", "parse_graph",
    "InvalidDecompositionError", "PathDecomposition", "TreeDecomposition",
    "ValidationReport", "branch_bag_union", "chop_subtrees",
    "contract_to_branch_td", "make_leaf_unique", "make_nice", "make_nice_path",
    "nice_kinds", "path_decomp_minus_Q", "read_td", "reduce_depth",
    "validate_pd", "validate_td", "write_td",
    "BlackBox", "BudgetExceededError", "IndependentSetResult",
    "box_clique_removal", "box_exact", "exact_mis_bruteforce",
    "exact_mis_td_dp", "greedy_degeneracy",
    "BlockPartition", "LevelPartition", "approx_level", "approx_pw",
    "block_partition", "level_partition", "vertex_lengths",
    "ComponentRecord", "PipelineTrace", "approx_component", "approx_tw",
    "leaf_unique_candidate", "level_split_Q",
    "AuditCheck", "run_audits",
]
