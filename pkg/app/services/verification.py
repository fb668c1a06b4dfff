"""
Verificação das construções tangente/adjunta: teste do produto interno e
diferenças finitas centradas da tangente, com aleatoriedade semeada.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from app.core.errors import VerificationFailure
from app.models.base import DynamicalModel
from app.models.vorticity import VorticityModel
from app.utils.numerics import RandomStream

logger = logging.getLogger(__name__)

DOT_PRODUCT_THRESHOLD = 1e-10
VORTICITY_DOT_PRODUCT_THRESHOLD = 1e-8
TANGENT_THRESHOLD = 1e-4
VORTICITY_TANGENT_THRESHOLD = 1e-3
FD_EPS = 1e-6
VORTICITY_FD_EPS = 1e-4


@dataclass
class AdjointReport:
    model: str
    trials: int
    dot_product_error: float
    tangent_error: float
    dot_product_threshold: float
    tangent_threshold: float

    @property
    def passed(self) -> bool:
        return self.dot_product_error <= self.dot_product_threshold and self.tangent_error <= self.tangent_threshold

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


class CorruptedAdjointModel(DynamicalModel):
    """Envolve um modelo e troca o sinal de uma entrada do adjunto (injeção de falha)."""

    def __init__(self, inner: DynamicalModel, entry: int = 0):
        self.inner = inner
        self.entry = entry
        self.name = f"{inner.name}(adjunto corrompido)"

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def dt(self) -> float:
        return self.inner.dt

    def step(self, u):
        return self.inner.step(u)

    def tangent(self, u, v):
        return self.inner.tangent(u, v)

    def adjoint(self, u, w):
        out = np.array(self.inner.adjoint(u, w), dtype=float)
        out[self.entry] = -out[self.entry]
        return out

    def initial_state(self):
        return self.inner.initial_state()


def thresholds_for(model: DynamicalModel) -> tuple:
    inner = getattr(model, "inner", model)
    if isinstance(inner, VorticityModel):
        return VORTICITY_DOT_PRODUCT_THRESHOLD, VORTICITY_TANGENT_THRESHOLD
    return DOT_PRODUCT_THRESHOLD, TANGENT_THRESHOLD


def dot_product_error(model: DynamicalModel, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
    """|⟨∇Hv, w⟩ − ⟨v, ∇Hᵀw⟩| / (‖∇Hv‖·‖w‖)."""
    tangent = model.tangent(u, v)
    left = float(np.dot(tangent, w))
    right = float(np.dot(v, model.adjoint(u, w)))
    scale = np.linalg.norm(tangent) * np.linalg.norm(w)
    return abs(left - right) / scale if scale > 0 else abs(left - right)


def tangent_error(model: DynamicalModel, u: np.ndarray, v: np.ndarray, eps: float) -> float:
    """Erro relativo entre ∇H·v e (H(u+εv) − H(u−εv))/(2ε)."""
    tangent = model.tangent(u, v)
    central = (model.step(u + eps * v) - model.step(u - eps * v)) / (2.0 * eps)
    scale = np.linalg.norm(tangent)
    return float(np.linalg.norm(central - tangent) / scale) if scale > 0 else float(np.linalg.norm(central))


def check_adjoint(
    model: DynamicalModel,
    trials: int = 100,
    seed: int = 7,
    perturbation: float = 0.1,
    fd_eps: Optional[float] = None,
    raise_on_failure: bool = True,
) -> AdjointReport:
    """
    Sorteia `trials` triplas (u, v, w) em torno do estado inicial do modelo e
    mede o maior erro do produto interno e da tangente por diferenças finitas.
    """
    if fd_eps is None:
        fd_eps = VORTICITY_FD_EPS if isinstance(getattr(model, "inner", model), VorticityModel) else FD_EPS
    stream = RandomStream(seed)
    base = model.initial_state()
    worst_dot, worst_tangent = 0.0, 0.0
    for _ in range(trials):
        u = base + perturbation * stream.draw(model.dim)
        v = stream.draw(model.dim)
        w = stream.draw(model.dim)
        worst_dot = max(worst_dot, dot_product_error(model, u, v, w))
        worst_tangent = max(worst_tangent, tangent_error(model, u, v, fd_eps))

    dot_threshold, tangent_threshold = thresholds_for(model)
    report = AdjointReport(
        model=model.name,
        trials=trials,
        dot_product_error=worst_dot,
        tangent_error=worst_tangent,
        dot_product_threshold=dot_threshold,
        tangent_threshold=tangent_threshold,
    )
    logger.info(
        f"Verificação do adjunto ({model.name}): produto interno {worst_dot:.3e} (limite {dot_threshold:.0e}), "
        f"tangente {worst_tangent:.3e} (limite {tangent_threshold:.0e})"
    )
    if raise_on_failure and not report.passed:
        if worst_dot > dot_threshold:
            raise VerificationFailure(
                f"Teste do produto interno falhou para {model.name}: {worst_dot:.3e} > {dot_threshold:.0e}",
                test_name="dot_product",
                value=worst_dot,
                threshold=dot_threshold,
            )
        raise VerificationFailure(
            f"Teste de diferenças finitas da tangente falhou para {model.name}: {worst_tangent:.3e} > {tangent_threshold:.0e}",
            test_name="tangent_finite_difference",
            value=worst_tangent,
            threshold=tangent_threshold,
        )
    return report
