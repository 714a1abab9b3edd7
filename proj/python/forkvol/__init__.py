"""EGARCH(1,1)-t volatility models with event regressors."""

from ._forkvol import (
    EstimationError,
    InputError,
    ModelSpec,
    ParameterSet,
    UsageError,
    describe,
    event_regressors,
    expected_abs_z,
    filter,
    fit,
    information_criteria,
    jarque_bera,
    simulate,
    std_t_log_density,
    to_returns,
    two_sided_p_value,
    welch_test,
)

