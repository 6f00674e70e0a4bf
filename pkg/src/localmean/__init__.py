"""Exact local means, indices and local densities of subtrees of trees."""

from .counting import (EnumerationGuardError, GlobalStats, Rational, RootedCounts, SubtreeStats, SubtreeTable,
                       global_stats, is_astral, local_mean, mean_lower_bound_check, oracle_stats,
                       pair_total_order, rooted_stats, subtree_stats)
from .density import (DensityMaxResult, DensityValue, RootedType, density_lower_bound_check,
                      density_step_equivalence, global_vs_local_density, limb_absorption_check, local_density,
                      max_density_subtree, rooted_type, two_vertex_comparison)
from .extremal import (ExtremalResult, LeafConfiguration, classify_leaves, index_guided_search, k_extremal,
                       two_star_closed_forms, verify_maximal_theorems, verify_minimal_theorem)
from .structure import (CoreDecomposition, core_decomposition, half_index_predicate, index, mu_exclude, mu_include,
                        outer_neighbor_monotonicity_check)
from .tree import (ContractionResult, Subtree, SubtreeError, Tree, TreeError, TreeFormatError, all_labeled_trees,
                   contract, enumerate_subtrees, generate, parse_tree, sample_labeled_trees, serialize_tree)
from ._kernels import BACKEND

__version__ = "0.1.0"
