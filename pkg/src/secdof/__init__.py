"""Cooperative-jamming secure DoF toolkit for the MIMO MAC and interference channel."""

from .errors import Infeasible, SdofError
from .jamming import PrecoderSet, StreamAllocation, build_precoder_set
from .scenario import Kind, Regime, Scheme, SystemConfig, classify_regime, sample_channels, validate_config
from .secrecy import (
    PowerPolicy,
    RateCurve,
    SdofReport,
    achievable_sdof,
    ic_upper_bound,
    mac_upper_bound,
    sum_secrecy_rate,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Infeasible",
    "Kind",
    "PowerPolicy",
    "PrecoderSet",
    "RateCurve",
    "Regime",
    "Scheme",
    "SdofError",
    "SdofReport",
    "StreamAllocation",
    "SystemConfig",
    "achievable_sdof",
    "build_precoder_set",
    "classify_regime",
    "ic_upper_bound",
    "mac_upper_bound",
    "sample_channels",
    "sum_secrecy_rate",
    "sweep",
    "validate_config",
]
