"""
Montagem do problema 4D-Var em experimentos gêmeos: geração de observações,
subobjetivos f_k, objetivo total, Lagrangiano aumentado, objetivo de tiro
F(u₀) e métricas de erro.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.errors import ConfigError
from app.models.base import DynamicalModel
from app.models.norms import EuclideanNorm, NormOperator
from app.utils.numerics import RandomStream

logger = logging.getLogger(__name__)


@dataclass
class ObservationSet:
    observations: np.ndarray
    background: np.ndarray
    q: int
    T_o: float
    noise_std: float
    seed: int
    truth: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.observations.shape[0] - 1

    @property
    def N(self) -> int:
        return self.n * self.q

    @property
    def dim(self) -> int:
        return self.observations.shape[1]


@dataclass
class AssimilationProblem:
    model: DynamicalModel
    obs: ObservationSet
    alpha: float = 0.1
    mu: float = 1.0
    norm: Optional[NormOperator] = field(default=None)

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigError(f"alpha deve ser >= 0 (recebido {self.alpha}).")
        if self.mu <= 0:
            raise ConfigError(f"mu deve ser > 0 (recebido {self.mu}).")
        if self.obs.dim != self.model.dim:
            raise ConfigError(
                f"Observações de dimensão {self.obs.dim} incompatíveis com o modelo {self.model.name} ({self.model.dim})."
            )
        if self.norm is None:
            self.norm = self.model.norm

    @property
    def N(self) -> int:
        return self.obs.N

    def observation_index(self, k: int) -> Optional[int]:
        if k % self.obs.q == 0:
            return k // self.obs.q
        return None


def generate_observations(
    model: DynamicalModel,
    u0_true: np.ndarray,
    N: int,
    q: int,
    noise_std: float,
    seed: int,
    T_o: Optional[float] = None,
    background: Optional[np.ndarray] = None,
) -> ObservationSet:
    """
    Integra o modelo N passos a partir de u0_true, registra os estados a cada
    q passos e soma ruído noise_std·ε, ε ~ N(0,1) da semente dada, em ordem
    (instante, componente). O fundo padrão é a observação (ruidosa) do instante 0.
    """
    if q < 1 or N % q != 0:
        raise ConfigError(f"q = {q} precisa dividir N = {N}.")
    if noise_std < 0:
        raise ConfigError(f"noise_std deve ser >= 0 (recebido {noise_std}).")
    truth = model.rollout(np.asarray(u0_true, dtype=float), N)
    observations = truth[::q].copy()
    if noise_std > 0:
        noise = RandomStream(seed).draw(observations.size).reshape(observations.shape)
        observations = observations + noise_std * noise
    logger.info(
        f"Observações geradas: modelo={model.name}, N={N}, q={q}, n={N // q}, ruído={noise_std}, semente={seed}"
    )
    return ObservationSet(
        observations=observations,
        background=observations[0].copy() if background is None else np.asarray(background, dtype=float),
        q=q,
        T_o=model.dt * q if T_o is None else T_o,
        noise_std=noise_std,
        seed=seed,
        truth=truth,
    )


def sub_objective(k: int, u_k: np.ndarray, prob: AssimilationProblem) -> float:
    index = prob.observation_index(k)
    if index is None:
        return 0.0
    value = 0.5 * prob.obs.T_o * prob.norm.sq(u_k - prob.obs.observations[index])
    if k == 0:
        value += 0.5 * prob.alpha * prob.norm.sq(u_k - prob.obs.background)
    return prob.mu * value


def total_objective(traj: np.ndarray, prob: AssimilationProblem) -> float:
    return float(sum(sub_objective(k, traj[k], prob) for k in range(0, prob.N + 1, prob.obs.q)))


def forecast_all(traj: np.ndarray, model: DynamicalModel) -> np.ndarray:
    """H(u_k) para k = 0..N-1."""
    return np.array([model.step(u) for u in traj[:-1]]).reshape(len(traj) - 1, model.dim)


def augmented_lagrangian(
    traj: np.ndarray,
    duals: np.ndarray,
    prob: AssimilationProblem,
    s: float,
    forecasts: Optional[np.ndarray] = None,
) -> float:
    """Forma com quadrado completado: Σf_k + (1/2s)Σ‖u_{k+1} − H(u_k) − sλ_k‖² − (s/2)Σ‖λ_k‖²."""
    forecasts = forecast_all(traj, prob.model) if forecasts is None else forecasts
    shifted = traj[1:] - forecasts - s * duals
    return total_objective(traj, prob) + np.sum(shifted**2) / (2.0 * s) - 0.5 * s * np.sum(duals**2)


def augmented_lagrangian_expanded(
    traj: np.ndarray,
    duals: np.ndarray,
    prob: AssimilationProblem,
    s: float,
    forecasts: Optional[np.ndarray] = None,
) -> float:
    """Forma original: Σf_k − Σ⟨λ_k, u_{k+1} − H(u_k)⟩ + (1/2s)Σ‖u_{k+1} − H(u_k)‖²."""
    forecasts = forecast_all(traj, prob.model) if forecasts is None else forecasts
    residual = traj[1:] - forecasts
    return total_objective(traj, prob) - np.sum(duals * residual) + np.sum(residual**2) / (2.0 * s)


def shooting_objective(u0: np.ndarray, prob: AssimilationProblem) -> float:
    """F(u₀) = T_o/2·Σ_k‖H^k(u₀) − û_k‖² + α/2‖u₀ − û₀ᵇ‖² (sem o fator μ)."""
    states = prob.model.rollout(np.asarray(u0, dtype=float), prob.N)
    return shooting_objective_from_states(states, prob)


def shooting_objective_from_states(states: np.ndarray, prob: AssimilationProblem) -> float:
    at_obs = states[:: prob.obs.q]
    misfit = sum(prob.norm.sq(x - y) for x, y in zip(at_obs, prob.obs.observations))
    return float(0.5 * prob.obs.T_o * misfit + 0.5 * prob.alpha * prob.norm.sq(states[0] - prob.obs.background))


def total_error(traj: np.ndarray, reference: np.ndarray) -> float:
    if traj.shape != reference.shape:
        raise ConfigError(f"Trajetórias com formas diferentes: {traj.shape} e {reference.shape}.")
    return float(np.sqrt(np.sum((traj - reference) ** 2)))


def constraint_error(
    traj: np.ndarray, model: DynamicalModel, forecasts: Optional[np.ndarray] = None
) -> float:
    forecasts = forecast_all(traj, model) if forecasts is None else forecasts
    return float(np.sum((traj[1:] - forecasts) ** 2))


def observation_errors(
    traj: np.ndarray, reference: np.ndarray, q: int, norm: NormOperator = EuclideanNorm()
) -> np.ndarray:
    """Erro em cada instante de observação (norma do problema, ex.: energia)."""
    return np.array([np.sqrt(max(norm.sq(a - b), 0.0)) for a, b in zip(traj[::q], reference[::q])])
