import numpy as np

from app.models.base import DynamicalModel
from app.schemas.dynamics import BurgersFDConfig
from app.utils.numerics import TridiagonalMatrix


def _coefficients(cfg: BurgersFDConfig):
    diffusion = cfg.gamma * cfg.dt / cfg.dx**2
    flux = cfg.dt / (4.0 * cfg.dx)
    return diffusion, flux


def fd_step(u: np.ndarray, cfg: BurgersFDConfig) -> np.ndarray:
    """
    Diferenças centradas com fronteira nula:
    u_i' = a·u_{i-1} + c·u_{i-1}² + (1-2a)·u_i + a·u_{i+1} − c·u_{i+1}²,
    a = γδt/δx², c = δt/(4δx).
    """
    a, c = _coefficients(cfg)
    padded = np.pad(np.asarray(u, dtype=float), 1)
    left, center, right = padded[:-2], padded[1:-1], padded[2:]
    return a * left + c * left**2 + (1.0 - 2.0 * a) * center + a * right - c * right**2


def fd_tangent_operator(u: np.ndarray, cfg: BurgersFDConfig) -> TridiagonalMatrix:
    a, c = _coefficients(cfg)
    u = np.asarray(u, dtype=float)
    return TridiagonalMatrix(
        lower=a + 2.0 * c * u[:-1],
        diagonal=np.full(u.size, 1.0 - 2.0 * a),
        upper=a - 2.0 * c * u[1:],
    )


def fd_tangent(u: np.ndarray, v: np.ndarray, cfg: BurgersFDConfig) -> np.ndarray:
    return fd_tangent_operator(u, cfg).matvec(v)


def fd_adjoint(u: np.ndarray, w: np.ndarray, cfg: BurgersFDConfig) -> np.ndarray:
    return fd_tangent_operator(u, cfg).transpose().matvec(w)


def fd_initial_state(cfg: BurgersFDConfig) -> np.ndarray:
    i = np.arange(1, cfg.m)
    return np.sin(i * np.pi / cfg.m)


class BurgersFDModel(DynamicalModel):
    name = "burgers-fd"

    def __init__(self, cfg: BurgersFDConfig = BurgersFDConfig()):
        self.cfg = cfg

    @property
    def dim(self) -> int:
        return self.cfg.dim

    @property
    def dt(self) -> float:
        return self.cfg.dt

    def step(self, u: np.ndarray) -> np.ndarray:
        return fd_step(u, self.cfg)

    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return fd_tangent(u, v, self.cfg)

    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return fd_adjoint(u, w, self.cfg)

    def initial_state(self) -> np.ndarray:
        return fd_initial_state(self.cfg)

    def quadratic_term_count(self) -> int:
        # u_{i-1}² e u_{i+1}² em cada ponto interior
        return 2 * self.dim
