"""Long-memory diagnostics and fractionally integrated volatility models."""
from .acf import AcfResult, PortmanteauResult, acf, ljung_box
from .exceptions import ConvergenceError, InputError, LongMemError, NumericalError
from .fracdiff import arch_infty_weights, fracdiff_coeffs, fracdiff_filter
from .memory import (GPH, ModifiedRS, Significance, gph_estimate, modified_rs,
                     newey_west_lrv, rs_d_estimate)
from .models import (FIEGARCH, FIGARCH, GARCH, ModelFit, ModelSpec, ParamVector, engle_lm,
                     fit, info_criteria)
from .series import (PowerProxyTransformer, PriceSeries, ReturnSeries, log_returns,
                     summary_stats, volatility_proxy, volume_change)

__version__ = "0.1.0"
