"""Desk-scale laboratory for the expander distinguishing problem: graph
oracles, blocked-matching distributions, a two-query verifier, walk-based
core sampling, sunflower extraction and adversary-method bounds."""

from .graphs import (ColoredGraph, ComponentPartition, OracleContext, Permutation,
                     all_self_loop_graph, complete_four_graph, components,
                     disjoint_union, load_graph, load_graph_csv, relabel,
                     restrict_to, save_graph, save_graph_csv, two_colored_cycle,
                     validate)
from .sampling import (DistributionParams, RejectionResult, SampleOutcome,
                       TriangleReport, component_profile, connected, desk_params,
                       exactly_components, paper_scale_params, profile_for,
                       sample_block_graph, sample_confined, sample_conditioned,
                       sample_cover_pair, sample_graph, sample_nonaborting,
                       single_block_params, triangle_comparison, triangle_count,
                       with_pinned)
from .spectral import (EigenEstimate, SpectralReport, WalkDistribution,
                       apply_normalized_adjacency, conductance_exact,
                       edge_expansion_exact, expanding, lazy_walk,
                       mixing_deviation, normalized_adjacency_matrix,
                       second_eigenvalue, spectral_report)
from .verifier import (DistributionAcceptance, VerifierOutcome,
                       acceptance_probability, acceptance_probability_statevector,
                       expectation_over_distribution, ideal_witness,
                       optimal_acceptance, repeated_acceptance, solve_reps,
                       subset_witness, uniform_witness)
from .walks import (OrderComparisonReport, WalkCoreSample, WalkParams,
                    WalkUniformityReport, compare_sampling_orders,
                    sample_walk_core, walk_abort_envelope, walk_params_for,
                    walk_uniformity_report)
from .sunflowers import (CoreSizeBound, Sunflower, SunflowerCheck,
                         core_size_bound, extract_sunflower, full_domain,
                         ideal_family, load_witness_map, random_witness_map,
                         save_witness_map, verify_sunflower)
from .adversary import (PermRelation, PermutationPair, QueryBound, RelationStats,
                        build_permutation_relation, differing_positions,
                        distinguishing_lower_bound, query_lower_bound,
                        relation_stats, sunflower_graph_bound,
                        sunflower_permutation_bound, union_relations)
from .experiments import (ConfigError, EXPERIMENTS, canonical_report_json,
                          emit_plot_tables, load_config, run_experiment,
                          write_report)

__version__ = "0.1.0"
