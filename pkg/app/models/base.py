import logging
from abc import ABC, abstractmethod

import numpy as np

from app.models.norms import EuclideanNorm, NormOperator

logger = logging.getLogger(__name__)


class DynamicalModel(ABC):
    """
    Contrato comum dos modelos: mapa de um passo H, tangente linear ∇H·v,
    adjunto ∇Hᵀ·w e a dimensão do estado. Os solvers (ADMM, baselines,
    verificação) só conhecem esta interface.
    """

    name: str = "model"

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    @property
    @abstractmethod
    def dt(self) -> float:
        ...

    @abstractmethod
    def step(self, u: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def initial_state(self) -> np.ndarray:
        ...

    @property
    def norm(self) -> NormOperator:
        return EuclideanNorm()

    def rollout(self, u0: np.ndarray, steps: int) -> np.ndarray:
        """Integra `steps` passos a partir de u0; devolve matriz (steps+1, dim)."""
        trajectory = np.empty((steps + 1, self.dim))
        trajectory[0] = u0
        for k in range(steps):
            trajectory[k + 1] = self.step(trajectory[k])
        return trajectory

    def tangent_matrix(self, u: np.ndarray) -> np.ndarray:
        """Materializa ∇H(u) coluna a coluna (uso em testes e dimensões pequenas)."""
        eye = np.eye(self.dim)
        return np.column_stack([self.tangent(u, eye[:, j]) for j in range(self.dim)])
