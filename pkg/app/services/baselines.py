"""
Métodos de tiro de primeira ordem para F(u₀): gradiente descendente e
gradiente conjugado não linear (Fletcher-Reeves, Polak-Ribière+), ambos com
busca de Armijo e gradiente por acumulação adjunta reversa.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from app.core.errors import LineSearchStall
from app.schemas.solvers import BaselineConfig
from app.services.fourdvar import AssimilationProblem, shooting_objective, shooting_objective_from_states

logger = logging.getLogger(__name__)


@dataclass
class BaselineRecord:
    iter: int
    objective: float
    grad_norm: float
    step_size: float


def shooting_value_and_gradient(u0: np.ndarray, prob: AssimilationProblem) -> Tuple[float, np.ndarray]:
    """
    Uma integração direta guardando os estados e uma passada reversa com o
    adjunto: p ← ∇H(x_{k-1})ᵀ(p + T_o·W(x_k − û)) de k = N até 1.
    """
    model, obs, norm = prob.model, prob.obs, prob.norm
    states = model.rollout(np.asarray(u0, dtype=float), prob.N)
    adjoint_state = np.zeros(model.dim)
    for k in range(prob.N, 0, -1):
        index = prob.observation_index(k)
        if index is not None:
            adjoint_state = adjoint_state + obs.T_o * norm.weight(states[k] - obs.observations[index])
        adjoint_state = model.adjoint(states[k - 1], adjoint_state)
    gradient = (
        adjoint_state
        + obs.T_o * norm.weight(states[0] - obs.observations[0])
        + prob.alpha * norm.weight(states[0] - obs.background)
    )
    return shooting_objective_from_states(states, prob), gradient


def shooting_gradient(u0: np.ndarray, prob: AssimilationProblem) -> np.ndarray:
    return shooting_value_and_gradient(u0, prob)[1]


class ShootingOptimizer:
    def __init__(self, prob: AssimilationProblem, cfg: BaselineConfig):
        self.prob = prob
        self.cfg = cfg
        self.history: List[BaselineRecord] = []

    def _line_search(self, u: np.ndarray, value: float, gradient: np.ndarray, direction: np.ndarray, first_step: float):
        """
        Armijo por retrocesso; devolve (passo, novo u, novo valor). Levanta LineSearchStall
        após max_halvings ou quando o passo já não move u em ponto flutuante.
        """
        cfg = self.cfg
        slope = float(np.dot(gradient, direction))
        step = first_step
        for _ in range(cfg.max_halvings):
            candidate = u + step * direction
            if np.array_equal(candidate, u):
                break
            candidate_value = shooting_objective(candidate, self.prob)
            if np.isfinite(candidate_value) and candidate_value <= value + cfg.sufficient_decrease * step * slope:
                return step, candidate, candidate_value
            step *= cfg.shrink
        logger.error(f"Busca linear sem decréscimo (passo final {step:.3e}, F={value:.6e}).")
        raise LineSearchStall(f"Busca linear estagnou com passo {step:.3e}.", u0=u.copy(), history=self.history)

    def run(self, u0_init: np.ndarray) -> Tuple[np.ndarray, List[BaselineRecord]]:
        cfg = self.cfg
        u = np.asarray(u0_init, dtype=float).copy()
        value, gradient = shooting_value_and_gradient(u, self.prob)
        direction = -gradient
        last_step = cfg.initial_step
        self.history = [BaselineRecord(0, value, float(np.linalg.norm(gradient)), 0.0)]
        logger.info(f"Baseline {cfg.method} iniciado: F={value:.6e}, ‖∇F‖={np.linalg.norm(gradient):.6e}")

        for it in range(1, cfg.max_iters + 1):
            if np.linalg.norm(gradient) <= cfg.grad_tol:
                logger.info(f"Baseline {cfg.method} convergiu na iteração {it - 1} (‖∇F‖ <= {cfg.grad_tol}).")
                break
            if np.dot(gradient, direction) >= 0.0:
                direction = -gradient
            last_step, u, value = self._line_search(
                u, value, gradient, direction, min(cfg.initial_step, last_step / cfg.shrink)
            )
            new_value, new_gradient = shooting_value_and_gradient(u, self.prob)
            direction = self._next_direction(gradient, new_gradient, direction)
            gradient = new_gradient
            self.history.append(BaselineRecord(it, new_value, float(np.linalg.norm(gradient)), last_step))
            logger.debug(f"Baseline {cfg.method} iteração {it}: F={new_value:.6e}, passo={last_step:.3e}")

        return u, self.history

    def _next_direction(self, gradient: np.ndarray, new_gradient: np.ndarray, direction: np.ndarray) -> np.ndarray:
        method = self.cfg.method
        if method == "gd":
            return -new_gradient
        denominator = float(np.dot(gradient, gradient))
        if denominator == 0.0:
            return -new_gradient
        if method == "cg-fr":
            beta = float(np.dot(new_gradient, new_gradient)) / denominator
        else:
            beta = max(float(np.dot(new_gradient, new_gradient - gradient)) / denominator, 0.0)
        candidate = -new_gradient + beta * direction
        if np.dot(candidate, new_gradient) >= 0.0:
            return -new_gradient
        return candidate


def gradient_descent(u0_init: np.ndarray, prob: AssimilationProblem, cfg: BaselineConfig):
    return ShootingOptimizer(prob, cfg.model_copy(update={"method": "gd"})).run(u0_init)


def nonlinear_cg(u0_init: np.ndarray, prob: AssimilationProblem, cfg: BaselineConfig):
    if cfg.method == "gd":
        cfg = cfg.model_copy(update={"method": "cg-pr"})
    return ShootingOptimizer(prob, cfg).run(u0_init)
