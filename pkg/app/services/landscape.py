"""
Varredura do objetivo de tiro F(u₀) numa grade tensorial de condições
iniciais (apenas modelos de dimensão <= 3).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from app.core.errors import DimensionGuardError
from app.models.lorenz import LorenzModel
from app.services.fourdvar import AssimilationProblem, shooting_objective

logger = logging.getLogger(__name__)

MAX_LANDSCAPE_DIM = 3
DEFAULT_BOX = ((-6.0, 6.0), (-6.0, 6.0), (14.0, 26.0))


@dataclass
class Landscape:
    axes: Tuple[np.ndarray, ...]
    values: np.ndarray

    def rows(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        for index in np.ndindex(self.values.shape):
            yield tuple(float(axis[index]) for axis in mesh) + (float(self.values[index]),)

    def minimum(self) -> Tuple[Tuple[float, ...], float]:
        index = np.unravel_index(np.argmin(self.values), self.values.shape)
        return tuple(float(axis[i]) for axis, i in zip(self.axes, index)), float(self.values[index])


def scan_landscape(
    prob: AssimilationProblem,
    box: Sequence[Tuple[float, float]] = DEFAULT_BOX,
    resolution: Union[int, Sequence[int]] = 49,
    threads: int = 1,
    chunk_size: int = 4096,
) -> Landscape:
    model = prob.model
    if model.dim > MAX_LANDSCAPE_DIM or len(box) != model.dim:
        raise DimensionGuardError(
            f"Varredura da paisagem exige dimensão <= {MAX_LANDSCAPE_DIM} e uma faixa por componente "
            f"(modelo {model.name} com dimensão {model.dim}, {len(box)} faixas)."
        )
    if isinstance(resolution, int):
        resolution = [resolution] * model.dim
    axes = tuple(np.linspace(lo, hi, r) for (lo, hi), r in zip(box, resolution))
    points = np.stack([axis.ravel() for axis in np.meshgrid(*axes, indexing="ij")], axis=-1)
    logger.info(f"Varrendo paisagem do objetivo: {len(points)} pontos, resolução {list(resolution)}")

    if isinstance(model, LorenzModel) and prob.norm.is_euclidean:
        chunks = [points[i : i + chunk_size] for i in range(0, len(points), chunk_size)]
        def evaluate(chunk: np.ndarray) -> np.ndarray:
            return _batched_objective(chunk, prob)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                values = np.concatenate(list(executor.map(evaluate, chunks)))
        else:
            values = np.concatenate([evaluate(chunk) for chunk in chunks])
    else:
        values = np.array([shooting_objective(point, prob) for point in points])

    return Landscape(axes=axes, values=values.reshape(tuple(resolution)))


def _batched_objective(points: np.ndarray, prob: AssimilationProblem) -> np.ndarray:
    snapshots = prob.model.batch_rollout(points, prob.N, stride=prob.obs.q)
    misfit = np.sum((snapshots - prob.obs.observations[:, None, :]) ** 2, axis=(0, 2))
    background = np.sum((points - prob.obs.background) ** 2, axis=1)
    return 0.5 * prob.obs.T_o * misfit + 0.5 * prob.alpha * background


def strict_local_minima(values: np.ndarray) -> list:
    """Células interiores de uma fatia 2D estritamente menores que as 8 vizinhas."""
    minima = []
    rows, cols = values.shape
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            window = values[i - 1 : i + 2, j - 1 : j + 2]
            neighbors = np.delete(window.ravel(), 4)
            if np.all(values[i, j] < neighbors):
                minima.append((i, j))
    return minima
