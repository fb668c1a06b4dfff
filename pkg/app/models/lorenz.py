"""
Lorenz-63 com RK4 clássico. A tangente e o adjunto são a derivada exata do
mapa RK4 discreto (não uma integração separada do sistema linearizado), de
modo que o teste do produto interno fecha em precisão de máquina.
"""
import numpy as np

from app.models.base import DynamicalModel
from app.schemas.dynamics import LorenzParams

TRUE_INITIAL_STATE = (-0.5, 0.5, 20.5)


def lorenz_rhs(u: np.ndarray, p: LorenzParams) -> np.ndarray:
    """Campo de Lorenz; aceita lotes com forma (..., 3)."""
    u = np.asarray(u, dtype=float)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    return np.stack(
        [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z],
        axis=-1,
    )


def lorenz_jacobian(u: np.ndarray, p: LorenzParams) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    x, y, z = u
    return np.array(
        [
            [-p.sigma, p.sigma, 0.0],
            [p.rho - z, -1.0, -x],
            [y, x, -p.beta],
        ]
    )


def _rk4_stages(u: np.ndarray, p: LorenzParams):
    dt = p.dt
    k1 = lorenz_rhs(u, p)
    u2 = u + 0.5 * dt * k1
    k2 = lorenz_rhs(u2, p)
    u3 = u + 0.5 * dt * k2
    k3 = lorenz_rhs(u3, p)
    u4 = u + dt * k3
    k4 = lorenz_rhs(u4, p)
    return (u2, u3, u4), (k1, k2, k3, k4)


def rk4_step(u: np.ndarray, p: LorenzParams) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    _, (k1, k2, k3, k4) = _rk4_stages(u, p)
    return u + p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_tangent_matrix(u: np.ndarray, p: LorenzParams) -> np.ndarray:
    """Derivada exata do passo RK4 em u (matriz 3×3)."""
    u = np.asarray(u, dtype=float)
    dt = p.dt
    eye = np.eye(3)
    (u2, u3, u4), _ = _rk4_stages(u, p)
    d1 = lorenz_jacobian(u, p)
    d2 = lorenz_jacobian(u2, p) @ (eye + 0.5 * dt * d1)
    d3 = lorenz_jacobian(u3, p) @ (eye + 0.5 * dt * d2)
    d4 = lorenz_jacobian(u4, p) @ (eye + dt * d3)
    return eye + dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)


def rk4_tangent(u: np.ndarray, v: np.ndarray, p: LorenzParams) -> np.ndarray:
    return rk4_tangent_matrix(u, p) @ np.asarray(v, dtype=float)


def rk4_adjoint(u: np.ndarray, w: np.ndarray, p: LorenzParams) -> np.ndarray:
    return rk4_tangent_matrix(u, p).T @ np.asarray(w, dtype=float)


class LorenzModel(DynamicalModel):
    name = "lorenz"

    def __init__(self, params: LorenzParams = LorenzParams()):
        self.params = params

    @property
    def dim(self) -> int:
        return 3

    @property
    def dt(self) -> float:
        return self.params.dt

    def step(self, u: np.ndarray) -> np.ndarray:
        return rk4_step(u, self.params)

    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return rk4_tangent(u, v, self.params)

    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return rk4_adjoint(u, w, self.params)

    def tangent_matrix(self, u: np.ndarray) -> np.ndarray:
        return rk4_tangent_matrix(u, self.params)

    def initial_state(self) -> np.ndarray:
        return np.array(TRUE_INITIAL_STATE)

    def batch_rollout(self, states: np.ndarray, steps: int, stride: int = 1) -> np.ndarray:
        """
        Integra um lote (B, 3) de condições iniciais; devolve (steps//stride + 1, B, 3)
        com os estados a cada `stride` passos.
        """
        current = np.asarray(states, dtype=float)
        snapshots = [current]
        for k in range(1, steps + 1):
            current = rk4_step(current, self.params)
            if k % stride == 0:
                snapshots.append(current)
        return np.stack(snapshots)
