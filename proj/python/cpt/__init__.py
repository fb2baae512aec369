"""Two-sample hypothesis tests built on classification probabilities.

The heavy lifting lives in the compiled `cpt._core` extension; this package
re-exports its public surface.
"""

from cpt._core import (
    Error,
    TestResult,
    fit_predict_proba,
    generate_scenario,
    median_heuristic_bandwidth,
    minimax_power,
    permutation_test,
    statistic_mmd,
    statistic_w1,
    statistic_w2,
)

__all__ = [
    "Error",
    "TestResult",
    "fit_predict_proba",
    "generate_scenario",
    "median_heuristic_bandwidth",
    "minimax_power",
    "permutation_test",
    "statistic_mmd",
    "statistic_w1",
    "statistic_w2",
]
