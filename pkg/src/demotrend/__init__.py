"""Demographic return model: data transforms, fitting, and validation tests.

The library turns an age pyramid and an index price history into aligned
change-rate and 12-month return series, links them with a two-coefficient
linear model, and checks the link with a from-scratch unit-root and
cointegration suite. The `demotrend` console script exposes the same
pipeline as subcommands.
"""
from .battery import BatteryReport, BatteryVerdict, run_battery
from .econometrics import (
    EngleGrangerResult,
    JohansenReport,
    LagSelection,
    OlsResult,
    UnitRootReport,
    VarFit,
    adf,
    dfgls,
    engle_granger,
    johansen,
    lag_select,
    ols,
    rejected_at,
    var_fit,
)
from .errors import ConfigError, DegenerateInputError, DemotrendError, SchemaError, SeriesError
from .model import (
    PRESETS,
    BacktestReport,
    ModelFit,
    Prediction,
    Preset,
    backtest,
    cumulate,
    evaluate_coefficients,
    fit,
    gdp_predict,
    gdp_predictor,
    measured_returns,
    predict,
)
from .population import (
    AgePyramid,
    ProxySpec,
    extract_age,
    intercensalize,
    n9_change_rate,
    smoothed_n9,
    synthesize_pyramid,
)
from .series import (
    MonthKey,
    MonthlySeries,
    QuarterKey,
    QuarterlySeries,
    align,
    annual_ratio_return,
    cumulative_return_12m,
    dln,
    monthly_return,
    moving_average,
    quarterly_to_monthly,
)

__version__ = "0.1.0"
