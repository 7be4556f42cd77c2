"""Large-system prediction of powers, SINRs and utilities for the PR games."""

from .models import Detection, LsaInput, LsaPrediction
from .predictor import (
    estimate_maxpower_count,
    improved_balance,
    lsa_power_improved,
    lsa_power_plain,
    lsa_sinr,
    lsa_sinr_real,
    lsa_sinrs,
    received_power_target,
)

__all__ = [
    "Detection",
    "LsaInput",
    "LsaPrediction",
    "estimate_maxpower_count",
    "improved_balance",
    "lsa_power_improved",
    "lsa_power_plain",
    "lsa_sinr",
    "lsa_sinr_real",
    "lsa_sinrs",
    "received_power_target",
]
