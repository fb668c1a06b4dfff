"""
Vorticidade 2D em grande escala: ∂ω/∂t + J(ψ, ω) = −κΔ²ω, ω = Δψ, com
ω = ψ = 0 na fronteira. Jacobiano de Arakawa (média de J1, J2, J3),
dissipação biharmônica e esquema preditor-corretor explícito.
"""
import logging
import threading
from functools import lru_cache

import numpy as np
from scipy.sparse import linalg as splinalg

from app.models.base import DynamicalModel
from app.models.norms import EnergyNorm, NormOperator
from app.schemas.dynamics import VorticityConfig
from app.utils.numerics import Grid2D, RandomStream, laplacian_apply, laplacian_matrix, sor_poisson_solve

logger = logging.getLogger(__name__)


def grid_of(cfg: VorticityConfig) -> Grid2D:
    return Grid2D(m=cfg.m, dx=cfg.dx, dy=cfg.dy)


def _arakawa_padded(pu: np.ndarray, pv: np.ndarray, dx: float, dy: float) -> np.ndarray:
    def shifted(p: np.ndarray):
        return {
            "E": p[2:, 1:-1], "W": p[:-2, 1:-1], "N": p[1:-1, 2:], "S": p[1:-1, :-2],
            "NE": p[2:, 2:], "NW": p[:-2, 2:], "SE": p[2:, :-2], "SW": p[:-2, :-2],
        }

    u, v = shifted(pu), shifted(pv)
    j1 = (u["E"] - u["W"]) * (v["N"] - v["S"]) - (u["N"] - u["S"]) * (v["E"] - v["W"])
    j2 = (
        u["E"] * (v["NE"] - v["SE"]) - u["W"] * (v["NW"] - v["SW"])
        - u["N"] * (v["NE"] - v["NW"]) + u["S"] * (v["SE"] - v["SW"])
    )
    j3 = (
        (u["NE"] - u["NW"]) * v["N"] - (u["SE"] - u["SW"]) * v["S"]
        - (u["NE"] - u["SE"]) * v["E"] + (u["NW"] - u["SW"]) * v["W"]
    )
    return (j1 + j2 + j3) / (12.0 * dx * dy)


def arakawa_jacobian(u: np.ndarray, v: np.ndarray, grid: Grid2D) -> np.ndarray:
    """J(u, v) nos pontos interiores, com camada fantasma nula."""
    pu = np.pad(grid.as_field(u), 1)
    pv = np.pad(grid.as_field(v), 1)
    return _arakawa_padded(pu, pv, grid.dx, grid.dy).ravel()


def arakawa_jacobian_closed(u: np.ndarray, v: np.ndarray, grid: Grid2D) -> np.ndarray:
    """
    J(u, v) avaliado no interior e no anel de fronteira ((m+1)² pontos).
    Nesta rede fechada ΣJ = 0; só no interior a soma difere pelo fluxo no anel.
    """
    pu = np.pad(grid.as_field(u), 2)
    pv = np.pad(grid.as_field(v), 2)
    return _arakawa_padded(pu, pv, grid.dx, grid.dy).ravel()


def jacobian_operator_matrix(u: np.ndarray, grid: Grid2D) -> splinalg.LinearOperator:
    """
    Operador linear 𝕁[u] com 𝕁[u]v = J(u, v). Com fronteira nula o operador é
    antissimétrico, logo 𝕁[u]ᵀw = −J(u, w) = J(w, u).
    """
    u = np.asarray(u, dtype=float).copy()
    dim = grid.interior_dim
    return splinalg.LinearOperator(
        (dim, dim),
        matvec=lambda v: arakawa_jacobian(u, v, grid),
        rmatvec=lambda w: arakawa_jacobian(w, u, grid),
        dtype=float,
    )


def materialize(operator: splinalg.LinearOperator) -> np.ndarray:
    return operator @ np.eye(operator.shape[1])


def biharmonic_apply(w: np.ndarray, grid: Grid2D) -> np.ndarray:
    return laplacian_apply(laplacian_apply(w, grid), grid)


class PoissonSolver:
    """Resolve Δ_h ψ = ω (Dirichlet nulo) por SOR ou por fatoração LU esparsa."""

    def __init__(self, cfg: VorticityConfig):
        self.cfg = cfg
        self.grid = grid_of(cfg)
        self._lu = None
        self._lock = threading.Lock()
        if cfg.poisson_method == "direct":
            self._lu = splinalg.splu(laplacian_matrix(self.grid).tocsc())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._lu is not None:
            with self._lock:
                return self._lu.solve(np.asarray(rhs, dtype=float))
        return sor_poisson_solve(
            rhs,
            self.grid,
            relax=self.cfg.sor_relax,
            tol=self.cfg.sor_tol,
            max_sweeps=self.cfg.sor_max_sweeps,
            ordering=self.cfg.sor_ordering,
        )


@lru_cache(maxsize=16)
def poisson_solver_for(cfg: VorticityConfig) -> PoissonSolver:
    return PoissonSolver(cfg)


def predict(w: np.ndarray, cfg: VorticityConfig) -> np.ndarray:
    grid = grid_of(cfg)
    psi = poisson_solver_for(cfg).solve(w)
    return _predict(w, psi, cfg, grid)


def _predict(w: np.ndarray, psi: np.ndarray, cfg: VorticityConfig, grid: Grid2D) -> np.ndarray:
    return w - cfg.dt * (arakawa_jacobian(psi, w, grid) + cfg.kappa * biharmonic_apply(w, grid))


def vorticity_step(w: np.ndarray, cfg: VorticityConfig) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    grid = grid_of(cfg)
    psi = poisson_solver_for(cfg).solve(w)
    predicted = _predict(w, psi, cfg, grid)
    return w - cfg.dt * (arakawa_jacobian(psi, predicted, grid) + cfg.kappa * biharmonic_apply(predicted, grid))


def tangent_apply(w: np.ndarray, dv: np.ndarray, cfg: VorticityConfig) -> np.ndarray:
    """
    δω' = [I + δt(𝕁[Pω]Δ⁻¹ − (𝕁[Δ⁻¹ω] + κΔ²)δP)]δω,
    δP = I + δt(𝕁[ω]Δ⁻¹ − 𝕁[Δ⁻¹ω] − κΔ²).
    """
    w = np.asarray(w, dtype=float)
    dv = np.asarray(dv, dtype=float)
    grid = grid_of(cfg)
    solver = poisson_solver_for(cfg)
    psi = solver.solve(w)
    predicted = _predict(w, psi, cfg, grid)
    inv_lap_dv = solver.solve(dv)

    d_pred = dv + cfg.dt * (
        arakawa_jacobian(w, inv_lap_dv, grid)
        - arakawa_jacobian(psi, dv, grid)
        - cfg.kappa * biharmonic_apply(dv, grid)
    )
    return dv + cfg.dt * (
        arakawa_jacobian(predicted, inv_lap_dv, grid)
        - arakawa_jacobian(psi, d_pred, grid)
        - cfg.kappa * biharmonic_apply(d_pred, grid)
    )


def adjoint_apply(w: np.ndarray, dw: np.ndarray, cfg: VorticityConfig) -> np.ndarray:
    """
    ∇Hᵀ = I + δt(Δ⁻¹𝕁[Pω]ᵀ − δPᵀ(𝕁[Δ⁻¹ω]ᵀ + κΔ²)); Δ⁻¹ e Δ² são simétricos.
    """
    w = np.asarray(w, dtype=float)
    dw = np.asarray(dw, dtype=float)
    grid = grid_of(cfg)
    solver = poisson_solver_for(cfg)
    psi = solver.solve(w)
    predicted = _predict(w, psi, cfg, grid)

    x = arakawa_jacobian(dw, psi, grid) + cfg.kappa * biharmonic_apply(dw, grid)
    d_pred_t = x + cfg.dt * (
        solver.solve(arakawa_jacobian(x, w, grid))
        - arakawa_jacobian(x, psi, grid)
        - cfg.kappa * biharmonic_apply(x, grid)
    )
    return dw + cfg.dt * (solver.solve(arakawa_jacobian(dw, predicted, grid)) - d_pred_t)


def energy_inner(a: np.ndarray, b: np.ndarray, cfg: VorticityConfig) -> float:
    """⟨a, (−Δ_h)⁻¹ b⟩."""
    return -float(np.dot(a, poisson_solver_for(cfg).solve(b)))


def vorticity_initial_state(cfg: VorticityConfig) -> np.ndarray:
    stream = RandomStream(cfg.truth_seed)
    return cfg.initial_scale * stream.draw(grid_of(cfg).interior_dim)


class VorticityModel(DynamicalModel):
    name = "vorticity2d"

    def __init__(self, cfg: VorticityConfig = VorticityConfig()):
        self.cfg = cfg
        self.grid = grid_of(cfg)
        self.poisson = poisson_solver_for(cfg)
        logger.info(
            f"Modelo de vorticidade: malha {self.grid.shape}, dt={cfg.dt}, κ={cfg.kappa}, Poisson={cfg.poisson_method}"
        )

    @property
    def dim(self) -> int:
        return self.grid.interior_dim

    @property
    def dt(self) -> float:
        return self.cfg.dt

    @property
    def norm(self) -> NormOperator:
        return EnergyNorm(self.grid, self.poisson.solve)

    def step(self, u: np.ndarray) -> np.ndarray:
        return vorticity_step(u, self.cfg)

    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return tangent_apply(u, v, self.cfg)

    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return adjoint_apply(u, w, self.cfg)

    def initial_state(self) -> np.ndarray:
        return vorticity_initial_state(self.cfg)

    def enstrophy(self, w: np.ndarray) -> float:
        return 0.5 * float(np.dot(w, w)) * self.grid.dx * self.grid.dy
