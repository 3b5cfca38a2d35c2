"""Conditional-volatility models in the GARCH family."""
from .base import Distribution, Family, ModelFit, ModelSpec, ParamVector
from .diagnostics import engle_lm, info_criteria
from .estimators import FIEGARCH, FIGARCH, GARCH
from .filters import (fiegarch_filter, figarch_filter, garch_filter, garch_params_to_figarch,
                      inadmissibility)
from .fit import fit, loglikelihood
from .likelihood import gaussian_loglik, student_t_loglik

__all__ = [
    "Distribution", "Family", "ModelFit", "ModelSpec", "ParamVector", "engle_lm",
    "info_criteria", "FIEGARCH", "FIGARCH", "GARCH", "fiegarch_filter", "figarch_filter",
    "garch_filter", "garch_params_to_figarch", "inadmissibility", "fit", "loglikelihood",
    "gaussian_loglik", "student_t_loglik",
]
