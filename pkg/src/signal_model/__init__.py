"""Physical uplink model: scenarios, spreading codes, augmented signatures and covariances."""

from .models import (
    AugmentedSignature,
    AugmentedSignatureSet,
    PowerDiagonal,
    Scenario,
    ScenarioConfig,
    SpreadingMatrix,
)
from .covariance import (
    augment,
    augmented_covariance,
    build_augmented_signature,
    code_array,
    covariance,
    pseudo_covariance,
)
from .generation import derive_seed, generate_codes, generate_scenario, received_power_scenario

__all__ = [
    "AugmentedSignature",
    "AugmentedSignatureSet",
    "PowerDiagonal",
    "Scenario",
    "ScenarioConfig",
    "SpreadingMatrix",
    "augment",
    "augmented_covariance",
    "build_augmented_signature",
    "code_array",
    "covariance",
    "pseudo_covariance",
    "derive_seed",
    "generate_codes",
    "generate_scenario",
    "received_power_scenario",
]
