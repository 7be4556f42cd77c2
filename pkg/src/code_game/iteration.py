"""Best-response spreading-code/receiver updates for a single user."""

import logging
from typing import Tuple

import numpy as np

from ..exceptions import InvalidInputError
from ..receivers import LinearReceiver, WlReceiver, hermitian_solve
from ..signal_model import Scenario, SpreadingMatrix, augment, code_array
from ..signal_model.covariance import CodesLike
from .metrics import weighted_correlation
from .models import Variant

logger = logging.getLogger(__name__)


def project_conjugate(vector: np.ndarray) -> np.ndarray:
    """Nearest [x; conj(x)]-structured vector to ``vector``."""
    half = vector.size // 2
    upper = 0.5 * (vector[:half] + vector[half:].conj())
    return np.concatenate([upper, upper.conj()])


class CodeIterationState:
    """
    Mutable state of one code/receiver best-response run.

    Holds the current signatures (augmented 2N x K for the WL game, the N x K
    codes for the linear game), the received-power weights and the data
    covariance built from them. The covariance tracks single-user updates by
    rank-one corrections and is rebuilt at the start of every sweep.
    """

    def __init__(self, scenario: Scenario, codes: CodesLike, variant: Variant = "wl"):
        """
        Initialize state.

        Args:
            scenario: Uplink realization (powers, gains, phases, noise)
            codes: Starting N x K spreading codes
            variant: "wl" or "linear"
        """
        if variant not in ("wl", "linear"):
            raise InvalidInputError(f"unknown variant: {variant}")
        self.scenario = scenario
        self.variant = variant
        columns = code_array(scenario, codes)
        received = scenario.p * scenario.h ** 2
        if variant == "wl":
            self.signatures = augment(columns, scenario.phi)
            self.weights = 2.0 * received
        else:
            self.signatures = np.array(columns, dtype=complex)
            self.weights = received.copy()
        self.noise_variance = scenario.noise_variance
        self.refresh()

    @property
    def dimension(self) -> int:
        return self.signatures.shape[0]

    def refresh(self) -> None:
        """Rebuild the covariance from the current signatures."""
        matrix = (self.signatures * self.weights) @ self.signatures.conj().T
        matrix += self.noise_variance * np.eye(self.dimension)
        self.covariance = 0.5 * (matrix + matrix.conj().T)

    def replace(self, k: int, signature: np.ndarray) -> None:
        """Swap user k's signature and update the covariance by a rank-one correction."""
        old = self.signatures[:, k].copy()
        self.signatures[:, k] = signature
        self.covariance += self.weights[k] * (np.outer(signature, signature.conj()) - np.outer(old, old.conj()))

    def correlation_matrix(self) -> np.ndarray:
        """S A S^H (WL) or S D S^H (linear)."""
        return (self.signatures * self.weights) @ self.signatures.conj().T

    def gram(self) -> np.ndarray:
        gram = self.signatures.conj().T @ self.signatures
        return gram.real if self.variant == "wl" else gram

    def potential(self) -> float:
        """The correlation potential the variant's updates decrease (WL-TWSC or TWSC)."""
        received = self.scenario.p * self.scenario.h ** 2
        return weighted_correlation(self.signatures, received)

    def codes(self) -> SpreadingMatrix:
        """Current spreading codes as a validated matrix."""
        if self.variant == "wl":
            half = self.scenario.N
            columns = np.sqrt(2.0) * self.signatures[:half] * np.exp(-1j * self.scenario.phi)[np.newaxis, :]
        else:
            columns = self.signatures
        return SpreadingMatrix(columns=columns / np.linalg.norm(columns, axis=0))

    def load_codes(self, codes: CodesLike) -> None:
        """Replace every signature with the embedding of ``codes``."""
        columns = code_array(self.scenario, codes)
        self.signatures = augment(columns, self.scenario.phi) if self.variant == "wl" else np.array(columns, dtype=complex)
        self.refresh()


def wl_code_iteration_step(state: CodeIterationState, k: int) -> Tuple[WlReceiver, np.ndarray]:
    """
    WL best response of user k with the other users frozen.

    d_{k,a} = sqrt(2 p_k) h_k M_a^{-1} s_{k,a} and s_{k,a} <- d_{k,a} / ||d_{k,a}||,
    where M_a already contains the updates of users 0..k-1 of this sweep.

    Returns:
        The MMSE receiver computed before the update and the new spreading code
    """
    if state.variant != "wl":
        raise InvalidInputError("WL step needs a WL iteration state")
    scenario = state.scenario
    direction = hermitian_solve(state.covariance, state.signatures[:, k])
    receiver = WlReceiver(d_a=np.sqrt(2.0 * scenario.p[k]) * scenario.h[k] * direction)
    direction = project_conjugate(direction)
    signature = direction / np.linalg.norm(direction)
    state.replace(k, signature)
    code = np.sqrt(2.0) * signature[: scenario.N] * np.exp(-1j * scenario.phi[k])
    return receiver, code


def linear_code_iteration_step(state: CodeIterationState, k: int) -> Tuple[LinearReceiver, np.ndarray]:
    """
    Linear best response of user k: s_k <- M^{-1} s_k / ||M^{-1} s_k||.

    The receiver carries the factor sqrt(p_k) h_k e^{j phi_k}; the code update
    drops that unit-modulus phase so a fixed point is a literal fixed point.
    """
    if state.variant != "linear":
        raise InvalidInputError("linear step needs a linear iteration state")
    scenario = state.scenario
    direction = hermitian_solve(state.covariance, state.signatures[:, k])
    receiver = LinearReceiver(d=np.sqrt(scenario.p[k]) * scenario.h[k] * np.exp(1j * scenario.phi[k]) * direction)
    code = direction / np.linalg.norm(direction)
    state.replace(k, code)
    return receiver, code


def sweep(state: CodeIterationState) -> None:
    """One Gauss-Seidel pass over users 0..K-1."""
    state.refresh()
    step = wl_code_iteration_step if state.variant == "wl" else linear_code_iteration_step
    for k in range(state.signatures.shape[1]):
        step(state, k)


def rotate_columns(columns: np.ndarray, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Rotate each unit column by an angle in (0, eps] toward a random orthogonal direction."""
    half = columns.shape[0]
    stacked = np.vstack([columns.real, columns.imag])
    rotated = np.empty_like(stacked)
    for k in range(stacked.shape[1]):
        v = stacked[:, k] / np.linalg.norm(stacked[:, k])
        u = rng.standard_normal(v.size)
        u -= (u @ v) * v
        u /= np.linalg.norm(u)
        angle = eps * (1.0 - rng.random())
        rotated[:, k] = np.cos(angle) * v + np.sin(angle) * u
    out = rotated[:half] + 1j * rotated[half:]
    return out / np.linalg.norm(out, axis=0)


def perturb_codes(codes: CodesLike, eps: float, seed: int) -> SpreadingMatrix:
    """
    Noisy version of a code set.

    Every code is rotated by at most ``eps`` radians in its real-imaginary
    stacked form, so the distance between the augmented sets is at most eps
    for any channel phases.
    """
    if eps <= 0:
        raise InvalidInputError(f"perturbation size must be positive, got {eps}")
    columns = codes.columns if isinstance(codes, SpreadingMatrix) else np.asarray(codes, dtype=complex)
    return SpreadingMatrix(columns=rotate_columns(columns, eps, np.random.default_rng(seed)))
