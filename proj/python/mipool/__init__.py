"""Pooling rules for multiply imputed data when the sample is the population."""

from ._core import (
    ConditionSummary,
    MipoolError,
    PooledResult,
    PoolingRule,
    SimulationConfig,
    barnard_rubin_df,
    cholesky,
    mice,
    pool_conventional,
    pool_simplified,
    report_csv,
    run_study,
    t_quantile,
)

__all__ = [
    "ConditionSummary",
    "MipoolError",
    "PooledResult",
    "PoolingRule",
    "SimulationConfig",
    "barnard_rubin_df",
    "cholesky",
    "mice",
    "pool_conventional",
    "pool_simplified",
    "report_csv",
    "run_study",
    "t_quantile",
]
