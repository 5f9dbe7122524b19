"""Predict-and-search toolkit for binary integer programs.

Thin re-export of the compiled core. The heavy lifting (parsing, solving,
featurization, training, trust-region search) lives in C++; these bindings
exist for scripting experiments and inspecting artifacts.
"""

from ._core import (
    BipartiteGraph,
    BruteForceResult,
    EdgeEntry,
    GenSpec,
    GnnModel,
    IncumbentEvent,
    LabeledSample,
    MilpInstance,
    PartialSolution,
    PoolEntry,
    SearchConfig,
    Solution,
    SolutionPool,
    SolveParams,
    SolveResult,
    SolveStats,
    TrainConfig,
    TrainHistory,
    brute_force,
    build_fixing,
    build_trust_region,
    check_feasible,
    dataset_loss,
    default_search_config,
    exact_marginals,
    featurize,
    forward,
    gain_percent,
    gap_abs,
    gap_rel,
    gen_combinatorial_auction,
    gen_independent_set,
    generate_instance,
    make_labels,
    make_model,
    model_from_json,
    model_to_json,
    parse_mps,
    predict_and_search,
    select_partial,
    solve_milp,
    train_gnn,
    write_dataset,
    write_mps,
)

__all__ = [
    "BipartiteGraph",
    "BruteForceResult",
    "EdgeEntry",
    "GenSpec",
    "GnnModel",
    "IncumbentEvent",
    "LabeledSample",
    "MilpInstance",
    "PartialSolution",
    "PoolEntry",
    "SearchConfig",
    "Solution",
    "SolutionPool",
    "SolveParams",
    "SolveResult",
    "SolveStats",
    "TrainConfig",
    "TrainHistory",
    "brute_force",
    "build_fixing",
    "build_trust_region",
    "check_feasible",
    "dataset_loss",
    "default_search_config",
    "exact_marginals",
    "featurize",
    "forward",
    "gain_percent",
    "gap_abs",
    "gap_rel",
    "gen_combinatorial_auction",
    "gen_independent_set",
    "generate_instance",
    "make_labels",
    "make_model",
    "model_from_json",
    "model_to_json",
    "parse_mps",
    "predict_and_search",
    "select_partial",
    "solve_milp",
    "train_gnn",
    "write_dataset",
    "write_mps",
]
