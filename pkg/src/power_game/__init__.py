"""Energy-efficiency power-control games with linear and widely-linear detection."""

from .models import GameOutcome, GameSchedule, GameVariant, TargetSinr, UserOutcome, UtilityConfig
from .efficiency import best_response_power, efficiency, efficiency_derivative, solve_target_sinr, utility
from .game import best_unilateral_gain, effective_interference, run_ee_game

__all__ = [
    "GameOutcome",
    "GameSchedule",
    "GameVariant",
    "TargetSinr",
    "UserOutcome",
    "UtilityConfig",
    "best_response_power",
    "efficiency",
    "efficiency_derivative",
    "solve_target_sinr",
    "utility",
    "best_unilateral_gain",
    "effective_interference",
    "run_ee_game",
]
