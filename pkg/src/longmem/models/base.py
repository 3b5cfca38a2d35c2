"""ModelSpec, parameter and fit containers."""
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from ..acf import PortmanteauResult
from ..exceptions import InputError

__all__ = ["Family", "Distribution", "ModelSpec", "ParamVector", "ModelFit"]


class Family(str, Enum):
    GARCH = "garch"
    FIGARCH = "figarch"
    FIEGARCH = "fiegarch"


class Distribution(str, Enum):
    STUDENT_T = "t"
    GAUSSIAN = "normal"


@dataclass(frozen=True)
class ModelSpec:
    """What to fit.

    ``exog_volume`` (aligned volume changes) is accepted by FIEGARCH only,
    as is ``include_leverage``.
    """

    family: Family = Family.FIGARCH
    include_leverage: bool = False
    exog_volume: Optional[np.ndarray] = field(default=None, repr=False)
    truncation_K: int = 1000
    distribution: Distribution = Distribution.STUDENT_T

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        if self.family is not Family.FIEGARCH:
            if self.include_leverage:
                raise InputError("leverage is only defined for FIEGARCH")
            if self.exog_volume is not None:
                raise InputError("the volume regressor is only accepted by FIEGARCH")
        if self.exog_volume is not None:
            vol = np.asarray(self.exog_volume, dtype=np.float64).ravel()
            if not np.all(np.isfinite(vol)):
                raise InputError("volume regressor contains non-finite values")
            object.__setattr__(self, "exog_volume", vol)
        if int(self.truncation_K) < 1:
            raise InputError("truncation_K must be positive")

    @property
    def param_names(self):
        if self.family is Family.GARCH:
            names = ["a", "arch1", "garch1"]
        elif self.family is Family.FIGARCH:
            names = ["a", "arch1", "garch1", "d"]
        else:
            names = ["a", "arch1", "garch1", "d"]
            if self.include_leverage:
                names.append("leverage")
            if self.exog_volume is not None:
                names.append("volume_coef")
        if self.distribution is Distribution.STUDENT_T:
            names.append("nu")
        return names

    @property
    def label(self):
        name = self.family.value.upper()
        if self.exog_volume is not None:
            name += "+volume"
        return name


@dataclass(frozen=True)
class ParamVector:
    """Variance-equation coefficients in their natural units.

    ``arch1``/``garch1`` are alpha/beta for GARCH, phi1/b1 for FIGARCH and the
    magnitude coefficient / log-variance AR root for FIEGARCH.
    """

    a: float
    arch1: float = 0.0
    garch1: float = 0.0
    d: float = 0.0
    leverage: float = 0.0
    volume_coef: float = 0.0
    nu: float = math.inf

    def to_array(self, names):
        return np.array([getattr(self, k) for k in names], dtype=np.float64)

    @classmethod
    def from_array(cls, values, names, **fixed):
        kw = dict(fixed)
        kw.update({k: float(v) for k, v in zip(names, values)})
        return cls(**kw)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ModelFit:
    spec: ModelSpec
    params: ParamVector
    std_errors: Dict[str, float]
    p_values: Dict[str, float]
    loglik: float
    aic: float
    bic: float
    sigma2_path: np.ndarray = field(repr=False)
    std_residuals: np.ndarray = field(repr=False)
    lm12: PortmanteauResult
    q2_12: PortmanteauResult
    mean: float
    n: int
    converged: bool = True
    grad_norm: float = 0.0
    hessian_ok: bool = True
    n_clamped: int = 0
    start_index: int = 0

    @property
    def param_names(self):
        return self.spec.param_names

    @property
    def n_params(self):
        return len(self.param_names)

    @property
    def conditional_volatility(self):
        return np.sqrt(self.sigma2_path)

    def coefficient_table(self):
        """Rows of ``(name, coefficient, std_error, p_value)``."""
        return [(k, getattr(self.params, k), self.std_errors[k], self.p_values[k])
                for k in self.param_names]
