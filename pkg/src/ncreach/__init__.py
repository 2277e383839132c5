"""Constrained-polynomial-zonotope set arithmetic and data-driven
reachability analysis for unknown discrete-time LTI systems."""

from .datadriven import (AlgorithmConfig, DataBatch, NoiseModel, ReachRun,
                         model_set_from_data, noise_coeff_vector,
                         noise_mat_zonotope, reach_step, refine_model_set,
                         run_algorithm1, stream_columns)
from .factors import FactorContext, allocate_ids
from .harness import (DEFAULT_PANELS, ExperimentConfig, ExperimentResult,
                      LtiSystem, benchmark_config, compare_widths,
                      convex_initial_set, execute_run, generate_data,
                      nonconvex_initial_set, paper_system, projection_rows,
                      result_projection_rows, run_experiment_1,
                      run_experiment_2, simulate, verify_run)
from .matsets import (ConstrainedMatZonotope, ConstrainedPolyMatZonotope,
                      MatrixZonotope, cmz_evaluate, cmz_intersect,
                      cmz_membership, cmz_to_cpmz, convert, cpmz_evaluate,
                      mz_evaluate, mz_to_cmz, sample_cmz, vectorize)
from .multiply import exact_multiply, merge_id_mixed
from .sampling import GeneratorLimitError, InfeasibleSetError
from .sets import (ConstrainedPolyZonotope, ConstrainedZonotope, Zonotope,
                   cartesian_product, compact_generators, evaluate_cpz,
                   evaluate_cpz_batch, exact_add, has_degree_one_constraints,
                   interval_enclosure, merge_id, rebind_ids, sample_cpz,
                   sample_feasible_factors, zonotope_to_cpz)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig", "ConstrainedMatZonotope", "ConstrainedPolyMatZonotope",
    "ConstrainedPolyZonotope", "ConstrainedZonotope", "DataBatch",
    "DEFAULT_PANELS", "ExperimentConfig", "ExperimentResult", "FactorContext",
    "GeneratorLimitError", "InfeasibleSetError", "LtiSystem",
    "MatrixZonotope", "NoiseModel", "ReachRun", "Zonotope", "allocate_ids",
    "benchmark_config", "cartesian_product", "cmz_evaluate", "cmz_intersect",
    "cmz_membership", "cmz_to_cpmz", "compact_generators", "compare_widths",
    "convert", "convex_initial_set", "cpmz_evaluate", "evaluate_cpz",
    "evaluate_cpz_batch", "exact_add", "exact_multiply", "execute_run",
    "generate_data", "has_degree_one_constraints", "interval_enclosure",
    "merge_id", "merge_id_mixed", "model_set_from_data", "mz_evaluate",
    "mz_to_cmz", "noise_coeff_vector", "noise_mat_zonotope",
    "nonconvex_initial_set", "paper_system", "projection_rows", "reach_step",
    "rebind_ids", "refine_model_set", "result_projection_rows",
    "run_algorithm1", "run_experiment_1", "run_experiment_2", "sample_cmz",
    "sample_cpz", "sample_feasible_factors", "simulate", "stream_columns",
    "vectorize", "verify_run", "zonotope_to_cpz",
]
