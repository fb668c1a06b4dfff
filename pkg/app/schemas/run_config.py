import math
import os
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings
from app.core.errors import ConfigError

ModelName = Literal["lorenz", "burgers-fd", "burgers-fem", "burgers-spectral", "vorticity2d"]

_BURGERS_COMMON = {
    "m": 100, "gamma": 0.05, "T": 2.0, "T_obs": 0.2,
    "mu": 20.0, "eta": 0.1, "s": 2.0 / 3.0, "alpha": 0.1,
    "init": "zeros", "max_iters": 500,
}

MODEL_DEFAULTS = {
    "lorenz": {
        "dt": 0.01, "T": 3.0, "T_obs": 0.3,
        "mu": 100.0, "eta": 0.1, "s": 2.0 / 3.0, "alpha": 0.1, "noise_std": 0.0,
        "init": "rollout:-3,-3,10", "max_iters": 600,
    },
    "burgers-fd": {**_BURGERS_COMMON, "dt": 0.005, "noise_std": 0.1},
    "burgers-fem": {**_BURGERS_COMMON, "dt": 0.002, "noise_std": 0.1},
    "burgers-spectral": {**_BURGERS_COMMON, "dt": 0.002, "noise_std": 0.1 * math.sqrt(2.0) * 0.1},
    "vorticity2d": {
        "m": 20, "dx": 0.2, "dy": 0.2, "dt": 0.12, "kappa": 4e-5, "T": 36.0, "T_obs": 3.6,
        "mu": 20.0, "eta": 0.1, "s": 2.0 / 3.0, "alpha": 0.1, "noise_std": 0.5,
        "init": "zeros", "max_iters": 600, "poisson_method": "sor", "truth_seed": 2024,
    },
}


class RunConfig(BaseModel):
    """
    Configuração de um experimento gêmeo. Chaves desconhecidas são rejeitadas;
    valores ausentes vêm da tabela de padrões do modelo via `resolved()`.
    """
    model_config = ConfigDict(extra="forbid")

    model: ModelName = Field(..., description="Modelo dinâmico")
    dt: Optional[float] = Field(None, gt=0, description="Passo de tempo")
    T: Optional[float] = Field(None, gt=0, description="Horizonte de assimilação")
    T_obs: Optional[float] = Field(None, gt=0, description="Intervalo entre observações")
    m: Optional[int] = Field(None, ge=1, description="Resolução espacial / número de modos")
    gamma: Optional[float] = Field(None, gt=0, description="Viscosidade de Burgers")
    kappa: Optional[float] = Field(None, ge=0, description="Coeficiente biharmônico")
    dx: Optional[float] = Field(None, gt=0, description="Espaçamento em x (vorticidade)")
    dy: Optional[float] = Field(None, gt=0, description="Espaçamento em y (vorticidade)")
    poisson_method: Optional[Literal["sor", "direct"]] = Field(None, description="Solver de Poisson")
    sor_tol: Optional[float] = Field(None, gt=0, description="Tolerância do SOR")
    truth_seed: Optional[int] = Field(None, description="Semente da condição inicial aleatória (vorticidade)")

    mu: Optional[float] = Field(None, gt=0, description="Escala dos termos de dados (ADMM)")
    eta: Optional[float] = Field(None, gt=0, description="Regularização proximal")
    s: Optional[float] = Field(None, gt=0, description="Parâmetro de penalidade")
    alpha: Optional[float] = Field(None, ge=0, description="Peso do termo de fundo")
    noise_std: Optional[float] = Field(None, ge=0, description="Desvio padrão do ruído de observação")
    seed: int = Field(42, description="Semente do ruído de observação")

    solver: Literal["admm", "gd", "cg-fr", "cg-pr"] = Field("admm", description="Método de solução")
    init: Optional[str] = Field(None, description="zeros | rollout:<componentes> | file:<caminho>")
    max_iters: Optional[int] = Field(None, ge=0, description="Varreduras (ADMM) ou iterações (baselines)")
    constraint_tol: Optional[float] = Field(None, gt=0, description="Parada antecipada do ADMM")
    schedule: Literal["jacobi", "gauss-seidel"] = Field("jacobi", description="Esquema das atualizações primais")
    threads: int = Field(settings.THREADS, ge=1, description="Trabalhadores (não altera resultados)")
    log_every: int = Field(50, ge=1, description="Intervalo de log de progresso")
    checkpoint_every: Optional[int] = Field(None, ge=1, description="Grava um instantâneo da trajetória a cada k varreduras")
    output_dir: Optional[str] = Field(None, description="Diretório de saída")

    initial_step: float = Field(1.0, gt=0, description="Passo inicial da busca linear")
    shrink: float = Field(0.5, gt=0, lt=1, description="Fator de redução do passo")
    sufficient_decrease: float = Field(1e-4, gt=0, le=0.5, description="Constante de Armijo")
    grad_tol: float = Field(1e-8, ge=0, description="Tolerância do gradiente")

    x_min: float = Field(-6.0, description="Paisagem: limite inferior de x0")
    x_max: float = Field(6.0, description="Paisagem: limite superior de x0")
    y_min: float = Field(-6.0, description="Paisagem: limite inferior de y0")
    y_max: float = Field(6.0, description="Paisagem: limite superior de y0")
    z_min: float = Field(14.0, description="Paisagem: limite inferior de z0")
    z_max: float = Field(26.0, description="Paisagem: limite superior de z0")
    resolution: int = Field(49, ge=1, description="Paisagem: pontos por eixo")

    trials: int = Field(100, ge=1, description="Triplas aleatórias na verificação do adjunto")
    check_seed: int = Field(7, description="Semente da verificação do adjunto")
    corrupt_adjoint: bool = Field(False, description="Depuração: corrompe o adjunto para testar a verificação")

    def resolved(self) -> "RunConfig":
        defaults = MODEL_DEFAULTS[self.model]
        updates = {key: value for key, value in defaults.items() if getattr(self, key) is None}
        if self.output_dir is None:
            updates["output_dir"] = os.path.join(settings.OUTPUT_DIR, self.model)
        config = self.model_copy(update=updates)
        config.steps()
        return config

    def steps(self) -> tuple:
        """(N, q): passos totais e passos por intervalo de observação."""
        N = _integral_ratio(self.T, self.dt, "T/dt")
        q = _integral_ratio(self.T_obs, self.dt, "T_obs/dt")
        if N % q != 0:
            raise ConfigError(f"T/T_obs precisa ser inteiro (N={N}, q={q}).")
        return N, q

    def model_params(self) -> dict:
        keys = ("dt", "m", "gamma", "kappa", "dx", "dy", "poisson_method", "sor_tol", "truth_seed")
        return {key: getattr(self, key) for key in keys if getattr(self, key) is not None}


def _integral_ratio(numerator: Optional[float], denominator: Optional[float], label: str) -> int:
    if numerator is None or denominator is None:
        raise ConfigError(f"Chave obrigatória ausente para {label}.")
    ratio = numerator / denominator
    rounded = int(round(ratio))
    if rounded < 1 or abs(ratio - rounded) > 1e-9 * max(1.0, ratio):
        raise ConfigError(f"{label} = {ratio} precisa ser inteiro positivo (tolerância 1e-9).")
    return rounded
