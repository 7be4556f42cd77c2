"""Linear and widely-linear receivers with SINR/MSE evaluation."""

from .models import LinearReceiver, WlReceiver
from .mmse import (
    hermitian_solve,
    linear_mmse,
    linear_mmse_matrix,
    matched_filter,
    wl_matched_filter,
    wl_mmse,
    wl_mmse_matrix,
)
from .sinr import linear_sinrs, mse_wl, sinr_linear, sinr_wl, wl_sinrs

__all__ = [
    "LinearReceiver",
    "WlReceiver",
    "hermitian_solve",
    "linear_mmse",
    "linear_mmse_matrix",
    "matched_filter",
    "wl_matched_filter",
    "wl_mmse",
    "wl_mmse_matrix",
    "linear_sinrs",
    "mse_wl",
    "sinr_linear",
    "sinr_wl",
    "wl_sinrs",
]
