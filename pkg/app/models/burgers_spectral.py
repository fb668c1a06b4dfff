"""
Burgers viscoso em Galerkin espectral na base sin(ix), i = 1..m, com u_0 ≡ 0
na convolução. A tangente é materializada como matriz densa m×m.
"""
import numpy as np

from app.models.base import DynamicalModel
from app.schemas.dynamics import BurgersSpectralConfig


def _convolution_terms(a: np.ndarray):
    m = a.size
    conv = np.zeros(m)
    # modo i (base 1): Σ_{l=1}^{i-1} u_l u_{i-l} = convolve[i-2]
    conv[1:] = np.convolve(a, a)[: m - 1]
    corr = np.correlate(a, a, mode="full")[m:]
    corr = np.append(corr, 0.0)
    return conv, corr


def spectral_step(u: np.ndarray, cfg: BurgersSpectralConfig) -> np.ndarray:
    a = np.asarray(u, dtype=float)
    modes = np.arange(1, a.size + 1)
    conv, corr = _convolution_terms(a)
    return a - cfg.dt * (modes / 4.0 * (conv - 2.0 * corr) + cfg.gamma * modes**2 * a)


def _gather(a: np.ndarray, idx: np.ndarray) -> np.ndarray:
    valid = (idx >= 0) & (idx < a.size)
    return np.where(valid, a[np.clip(idx, 0, a.size - 1)], 0.0)


def spectral_tangent_matrix(u: np.ndarray, cfg: BurgersSpectralConfig) -> np.ndarray:
    a = np.asarray(u, dtype=float)
    m = a.size
    rows, cols = np.indices((m, m))
    modes = rows + 1
    d_conv = 2.0 * _gather(a, rows - 1 - cols)
    d_corr = _gather(a, cols + modes) + _gather(a, cols - modes)
    jac = -cfg.dt * (modes / 4.0) * (d_conv - 2.0 * d_corr)
    jac[np.diag_indices(m)] += 1.0 - cfg.dt * cfg.gamma * np.arange(1, m + 1) ** 2
    return jac


def spectral_tangent(u: np.ndarray, v: np.ndarray, cfg: BurgersSpectralConfig) -> np.ndarray:
    return spectral_tangent_matrix(u, cfg) @ np.asarray(v, dtype=float)


def spectral_adjoint(u: np.ndarray, w: np.ndarray, cfg: BurgersSpectralConfig) -> np.ndarray:
    return spectral_tangent_matrix(u, cfg).T @ np.asarray(w, dtype=float)


def spectral_initial_state(cfg: BurgersSpectralConfig) -> np.ndarray:
    u0 = np.zeros(cfg.m)
    u0[0] = 1.0
    return u0


class BurgersSpectralModel(DynamicalModel):
    name = "burgers-spectral"

    def __init__(self, cfg: BurgersSpectralConfig = BurgersSpectralConfig()):
        self.cfg = cfg

    @property
    def dim(self) -> int:
        return self.cfg.dim

    @property
    def dt(self) -> float:
        return self.cfg.dt

    def step(self, u: np.ndarray) -> np.ndarray:
        return spectral_step(u, self.cfg)

    def tangent(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return spectral_tangent(u, v, self.cfg)

    def adjoint(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return spectral_adjoint(u, w, self.cfg)

    def tangent_matrix(self, u: np.ndarray) -> np.ndarray:
        return spectral_tangent_matrix(u, self.cfg)

    def initial_state(self) -> np.ndarray:
        return spectral_initial_state(self.cfg)

    def quadratic_term_count(self) -> int:
        # por modo: i-1 produtos na convolução e m-i na correlação
        return self.dim * (self.dim - 1)
