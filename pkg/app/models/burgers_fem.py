"""
Burgers viscoso por Galerkin com elementos lineares por partes:
R (massa), T (rigidez) e S1[u] (convecção) tridiagonais.
"""
import numpy as np

from app.models.base import DynamicalModel
from app.schemas.dynamics import BurgersFEMConfig
from app.utils.numerics import TridiagonalMatrix, tridiagonal_solve


def mass_matrix(cfg: BurgersFEMConfig) -> TridiagonalMatrix:
    return TridiagonalMatrix.constant(cfg.dim, cfg.dx / 6.0, 2.0 * cfg.dx / 3.0, cfg.dx / 6.0)


def stiffness_matrix(cfg: BurgersFEMConfig) -> TridiagonalMatrix:
    return TridiagonalMatrix.constant(cfg.dim, -1.0 / cfg.dx, 2.0 / cfg.dx, -1.0 / cfg.dx)


def fem_assemble_s1(u: np.ndarray) -> TridiagonalMatrix:
    """
    S1[u]: diagonal (u_{i+1} − u_{i−1})/3 e fora da diagonal (u_{i+1} − u_i)/6,
    simétrica, com u_0 = u_m = 0. S1[u]u reproduz o termo convectivo de Galerkin
    (u_{i+1} − u_{i−1})(u_{i+1} + u_i + u_{i−1})/6.
    """
    padded = np.pad(np.asarray(u, dtype=float), 1)
    diagonal = (padded[2:] - padded[:-2]) / 3.0
    off = (padded[2:-1] - padded[1:-2]) / 6.0
    return TridiagonalMatrix(lower=off, diagonal=diagonal, upper=off.copy())


def fem_assemble_s2(u: np.ndarray) -> TridiagonalMatrix:
    """
    S2[u] com S2[u]δ = S1[δ]u, de modo que S1 + S2 é a derivada de S1[u]u.
    Linha i: −(u_{i−1} + 2u_i)/6, (u_{i−1} − u_{i+1})/6, (2u_i + u_{i+1})/6.
    """
    padded = np.pad(np.asarray(u, dtype=float), 1)
    left, center, right = padded[:-2], padded[1:-1], padded[2:]
    sub = -(left + 2.0 * center) / 6.0
    sup = (2.0 * center + right) / 6.0
    return TridiagonalMatrix(lower=sub[1:], diagonal=(left - right) / 6.0, upper=sup[:-1])


def fem_step(u: np.ndarray, cfg: BurgersFEMConfig) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    rhs = fem_assemble_s1(u).matvec(u) + cfg.gamma * stiffness_matrix(cfg).matvec(u)
    return u - cfg.dt * tridiagonal_solve(mass_matrix(cfg), rhs)


def _linearized_operator(u: np.ndarray, cfg: BurgersFEMConfig) -> TridiagonalMatrix:
    return fem_assemble_s1(u) + fem_assemble_s2(u) + stiffness_matrix(cfg).scaled(cfg.gamma)


def fem_tangent(u: np.ndarray, v: np.ndarray, cfg: BurgersFEMConfig) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v - cfg.dt * tridiagonal_solve(mass_matrix(cfg), _linearized_operator(u, cfg).matvec(v))


def fem_adjoint(u: np.ndarray, w: np.ndarray, cfg: BurgersFEMConfig) -> np.ndarray:
    # R é simétrica: (R⁻¹A)ᵀ = AᵀR⁻¹
    w = np.asarray(w, dtype=float)
    return w - cfg.dt * _linearized_operator(u, cfg).transpose().matvec(tridiagonal_solve(mass_matrix(cfg), w))


def fem_initial_state(cfg: BurgersFEMConfig) -> np.ndarray:
    nodal_sin = np.sin(np.arange(1, cfg.m) * cfg.dx)
    return tridiagonal_solve(mass_matrix(cfg), stiffness_matrix(cfg).matvec(nodal_sin))


class BurgersFEMModel(DynamicalModel):
    name = "burgers-fem"

    def __init__(self, cfg: BurgersFEMConfig = BurgersFEMConfig()):
        self.cfg = cfg

    @property
    def dim(self) -> int:
        return self.cfg.dim

    @property
    def dt(self) -> float:
        return self.cfg.dt

    def step(self, u: np.ndarray) -> np.ndarray:
        return fem_step(u, self.cfg)

    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return fem_tangent(u, v, self.cfg)

    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return fem_adjoint(u, w, self.cfg)

    def initial_state(self) -> np.ndarray:
        return fem_initial_state(self.cfg)

    def quadratic_term_count(self) -> int:
        # cada entrada não nula de S1[u] é uma diferença de dois valores, multiplicada por u
        return 2 * (3 * self.dim - 2)
