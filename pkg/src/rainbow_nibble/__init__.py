"""Full rainbow matchings in edge-coloured graphs and hypergraphs.

A randomized chunked algorithm with an analytic schedule, exact oracles,
instance generators and a Monte Carlo experiment harness.
"""

from .model import (Clause, FamilyStats, HypothesisReport, MatchingFamily,
                    RainbowMatching, check_hypotheses, compute_stats, validate,
                    verify_rainbow)
from .rmf import (RmfError, read_rmf, read_selection, selection_to_string,
                  write_rmf, write_selection)
from .schedule import (AB_CLAUSES, ErrorTerms, ScheduleParams,
                       check_ab_constraints, choose_alpha, choose_epsilon,
                       error_term_table, final_stage_guard, g, r,
                       schedule_table, theoretical_error_terms)
from .generators import (GeneratorError, LiftedFamily, bipartition,
                         cyclic_latin_square, find_2regular_counterexample,
                         gen_double_star, gen_latin, gen_random_simple,
                         gen_two_k4, latin_square_to_family, lift_to_3uniform,
                         pad_with_disjoint_matchings)
from .exact import (ExactResult, MaxRainbowResult, enumerate_oracle,
                    find_full, max_rainbow)
from .nibble import (RunOutcome, TrajectoryRecord, greedy_complete,
                     marking_probability, run)
from .harness import (CellResult, ExperimentSpec, run_experiment,
                      trajectory_report, write_outputs)

__version__ = "0.1.0"

__all__ = [
    "MatchingFamily", "RainbowMatching", "FamilyStats", "Clause",
    "HypothesisReport", "validate", "compute_stats", "verify_rainbow",
    "check_hypotheses",
    "RmfError", "read_rmf", "write_rmf", "read_selection", "write_selection",
    "selection_to_string",
    "r", "g", "choose_alpha", "choose_epsilon", "final_stage_guard",
    "ScheduleParams", "ErrorTerms", "error_term_table",
    "theoretical_error_terms", "AB_CLAUSES", "check_ab_constraints",
    "schedule_table",
    "GeneratorError", "gen_random_simple", "cyclic_latin_square",
    "latin_square_to_family", "gen_latin", "gen_double_star", "gen_two_k4",
    "LiftedFamily", "lift_to_3uniform", "bipartition",
    "pad_with_disjoint_matchings", "find_2regular_counterexample",
    "ExactResult", "MaxRainbowResult", "find_full", "max_rainbow",
    "enumerate_oracle",
    "TrajectoryRecord", "RunOutcome", "marking_probability",
    "greedy_complete", "run",
    "ExperimentSpec", "CellResult", "run_experiment", "write_outputs",
    "trajectory_report",
]
