from .runner import RunConfig, RunResult, calibrate_alpha, run, summarize, verify_dump
from .workloads import (Workload, adversary_layout, gen_matching_adversary, gen_planted,
                        gen_spanner_skew, gen_uniform, skew_layout, validate)

__all__ = ["RunConfig", "RunResult", "calibrate_alpha", "run", "summarize", "verify_dump",
           "Workload", "adversary_layout", "gen_matching_adversary", "gen_planted",
           "gen_spanner_skew", "gen_uniform", "skew_layout", "validate"]
