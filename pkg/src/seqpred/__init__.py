"""Randomized individual-sequence prediction with user-specified mistake targets."""

from .core import (
    Forecast,
    PotentialFunction,
    Transcript,
    check_stability,
    expected_mistakes,
    mean_phi,
)
from .predictors import (
    CovariateSampler,
    PlayoutConfig,
    binary_mean,
    covariate_forecast,
    draw,
    multiclass_forecast,
    waterfill,
)

__all__ = [
    "Forecast",
    "PotentialFunction",
    "Transcript",
    "check_stability",
    "expected_mistakes",
    "mean_phi",
    "CovariateSampler",
    "PlayoutConfig",
    "binary_mean",
    "covariate_forecast",
    "draw",
    "multiclass_forecast",
    "waterfill",
]

__version__ = "0.1.0"
