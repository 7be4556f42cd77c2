"""Experiment configuration and per-figure presets."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..code_game import IterationSchedule
from ..lsa import Detection
from ..power_game import GameSchedule, GameVariant, UtilityConfig
from ..signal_model import ScenarioConfig

logger = logging.getLogger(__name__)

FigureId = Literal["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom"]
FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom")

FULL_SCALE_TRIALS = 100_000


class ExperimentConfig(BaseModel):
    """
    Everything needed to regenerate one dataset.

    Fields left at None take the figure's preset (see ``resolved``).
    """

    figure: FigureId = Field("custom", description="Figure id or 'custom'")
    trials: int = Field(1000, ge=1, description="Monte-Carlo trials per point")
    master_seed: int = Field(0, ge=0, description="Seed from which every trial seed is derived")
    workers: int = Field(1, ge=1, description="Worker processes for Monte-Carlo trials")
    full_scale: bool = Field(False, description=f"Use {FULL_SCALE_TRIALS} trials")
    output_dir: Optional[str] = Field(None, description="Directory for CSV and metadata files")

    scenario: Optional[ScenarioConfig] = Field(None, description="Random-scenario parameters (K is overridden per point)")
    user_counts: Optional[List[int]] = Field(None, description="User counts K swept by the Monte-Carlo figures")
    variants: List[GameVariant] = Field(default_factory=lambda: list(GameVariant), min_length=1)
    detections: List[Detection] = Field(default_factory=lambda: ["wl"], min_length=1)
    code_kind: Literal["binary", "complex-gaussian-normalized"] = "binary"

    code_noise_psd: float = Field(0.05, gt=0.0, description="N0 of the unit-gain code-iteration setups")
    utility: UtilityConfig = Field(default_factory=UtilityConfig)
    game_schedule: GameSchedule = Field(default_factory=GameSchedule)
    code_schedule: IterationSchedule = Field(default_factory=IterationSchedule)

    @field_validator("user_counts")
    @classmethod
    def _positive_counts(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 1):
            raise ValueError("user_counts must be a non-empty list of positive integers")
        return value

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """Load a JSON config file."""
        text = Path(path).read_text(encoding="utf-8")
        logger.debug("Loaded config from %s", path)
        return cls.model_validate_json(text)

    @property
    def effective_trials(self) -> int:
        return FULL_SCALE_TRIALS if self.full_scale else self.trials

    def resolved(self, figure: Optional[str] = None) -> "ExperimentConfig":
        """Fill unset scenario and user counts from the figure presets."""
        figure = figure or self.figure
        preset = FIGURE_PRESETS.get(figure, FIGURE_PRESETS["custom"])
        update: Dict[str, object] = {"figure": figure}
        if self.scenario is None:
            update["scenario"] = ScenarioConfig(**preset["scenario"])
        if self.user_counts is None:
            update["user_counts"] = list(preset["user_counts"])
        return self.model_copy(update=update)

    def fingerprint(self) -> str:
        """Canonical JSON used for the config hash."""
        return json.dumps(self.model_dump(mode="json", exclude={"workers", "output_dir"}), sort_keys=True)


FIGURE_PRESETS: Dict[str, Dict[str, object]] = {
    "fig1": {"scenario": {"K": 10, "N": 15}, "user_counts": [10, 20]},
    "fig2": {"scenario": {"K": 10, "N": 15}, "user_counts": [10, 20]},
    "fig3": {"scenario": {"K": 12, "N": 5}, "user_counts": [12]},
    "fig4": {"scenario": {"K": 2, "N": 11}, "user_counts": list(range(2, 23, 2))},
    "fig5": {"scenario": {"K": 2, "N": 11}, "user_counts": list(range(2, 23, 2))},
    "fig6": {"scenario": {"K": 2, "N": 11}, "user_counts": list(range(2, 23, 2))},
    "fig7": {"scenario": {"K": 2, "N": 11}, "user_counts": list(range(2, 23, 2))},
    "fig8": {"scenario": {"K": 32, "N": 64, "path_loss_exponent": 3.0}, "user_counts": [32, 64, 96, 128]},
    "custom": {"scenario": {"K": 10, "N": 11}, "user_counts": [10]},
}

# tr(A^2) targets of the random-power code-iteration runs, keyed by K
TWSC_TARGETS = {10: 5.36, 20: 12.08}

# received powers of the oversized-user example
OVERSIZED_POWERS = [11.51, 7.94] + [1.0] * 10
