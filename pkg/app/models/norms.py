"""
Produtos internos usados nos termos de dados: euclidiano ou de energia,
este último ⟨a, b⟩_E = ⟨a, (−Δ_h)⁻¹ b⟩ para campos de vorticidade.
"""
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

from app.utils.numerics import Grid2D, laplacian_apply


class NormOperator(ABC):
    kind: str

    @abstractmethod
    def weight(self, x: np.ndarray) -> np.ndarray:
        """Aplica a matriz de peso M do produto interno."""

    @abstractmethod
    def inv_weight(self, x: np.ndarray) -> np.ndarray:
        """Aplica K = M⁻¹."""

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(a, self.weight(b)))

    def sq(self, x: np.ndarray) -> float:
        return self.inner(x, x)

    @property
    def is_euclidean(self) -> bool:
        return False


class EuclideanNorm(NormOperator):
    kind = "euclidean"

    def weight(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def inv_weight(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def sq(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.dot(x, x))

    @property
    def is_euclidean(self) -> bool:
        return True


class EnergyNorm(NormOperator):
    kind = "energy"

    def __init__(self, grid: Grid2D, solve_poisson: Callable[[np.ndarray], np.ndarray]):
        self.grid = grid
        self.solve_poisson = solve_poisson

    def weight(self, x: np.ndarray) -> np.ndarray:
        return -self.solve_poisson(x)

    def inv_weight(self, x: np.ndarray) -> np.ndarray:
        return -laplacian_apply(x, self.grid)
