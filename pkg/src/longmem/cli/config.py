"""Analysis configuration: defaults, flat key=value files and CLI overrides."""
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Tuple

from ..exceptions import InputError

MODEL_CHOICES = ("garch", "figarch", "fiegarch", "fiegarch_volume")


@dataclass(frozen=True)
class AnalysisConfig:
    input_path: Optional[str] = None
    date_col: str = "date"
    price_col: str = "price"
    volume_col: Optional[str] = None
    powers: Tuple[float, ...] = (0.25, 0.5, 1.0, 1.5, 2.0)
    gph_m: Optional[int] = None
    gph_power: float = 0.8
    nw_q: Optional[int] = None
    models: Tuple[str, ...] = MODEL_CHOICES
    trunc_k: int = 1000
    acf_lags: int = 100
    out: str = "longmem-out"
    seed: int = 20061101

    def __post_init__(self):
        if any(not p > 0 for p in self.powers):
            raise InputError(f"power grid entries must be positive: {self.powers}")
        bad = [m for m in self.models if m not in MODEL_CHOICES]
        if bad:
            raise InputError(f"unknown models {bad}; choose from {MODEL_CHOICES}")
        if self.trunc_k < 1:
            raise InputError("trunc_k must be positive")


def _parse_list(text, conv):
    text = text.strip()
    if text.lower() in ("", "none"):
        return ()
    return tuple(conv(v.strip()) for v in text.split(",") if v.strip())


def _optional_int(text):
    text = str(text).strip()
    return None if text.lower() in ("", "none", "auto") else int(text)


_CONVERTERS = {
    "input_path": str, "date_col": str, "price_col": str,
    "volume_col": lambda t: None if t.strip().lower() in ("", "none") else t.strip(),
    "powers": lambda t: _parse_list(t, float),
    "gph_m": _optional_int, "gph_power": float, "nw_q": _optional_int,
    "models": lambda t: _parse_list(t, str),
    "trunc_k": int, "acf_lags": int, "out": str, "seed": int,
}
_ALIASES = {"input": "input_path", "k": "trunc_k", "truncation_k": "trunc_k"}


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}:{no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in _CONVERTERS:
            raise InputError(f"{source}:{no}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ValueError as exc:
            raise InputError(f"{source}:{no}: {exc}") from None
    return values


def build_config(file_path=None, overrides=None):
    """Defaults, then the config file, then non-None ``overrides``."""
    values = {}
    if file_path:
        try:
            text = Path(file_path).read_text()
        except OSError as exc:
            raise InputError(f"cannot read config {file_path}: {exc}") from exc
        values.update(parse_config_text(text, str(file_path)))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    known = {f.name for f in fields(AnalysisConfig)}
    return AnalysisConfig(**{k: v for k, v in values.items() if k in known})
