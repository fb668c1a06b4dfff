import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class LorenzParams(BaseModel):
    """Parâmetros do sistema de Lorenz-63 integrado por RK4."""
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(10.0, description="Número de Prandtl")
    rho: float = Field(28.0, description="Número de Rayleigh reduzido")
    beta: float = Field(8.0 / 3.0, description="Razão de aspecto")
    dt: float = Field(0.01, gt=0, description="Passo de tempo do RK4")


class BurgersFDConfig(BaseModel):
    """Burgers viscoso em diferenças finitas, domínio [0, π] com fronteira nula."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(100, ge=3, description="Número de intervalos da malha")
    gamma: float = Field(0.05, gt=0, description="Viscosidade")
    dt: float = Field(0.005, gt=0, description="Passo de tempo (Euler explícito)")

    @property
    def dx(self) -> float:
        return math.pi / self.m

    @property
    def dim(self) -> int:
        return self.m - 1

    @model_validator(mode="after")
    def check_stability(self):
        ratio = 2.0 * self.gamma * self.dt / self.dx**2
        if ratio >= 1.0:
            raise ValueError(f"Esquema instável: 2γδt/δx² = {ratio:.4f} >= 1 (reduza dt).")
        return self


class BurgersFEMConfig(BaseModel):
    """Burgers viscoso por elementos finitos lineares (funções chapéu)."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(100, ge=3, description="Número de elementos")
    gamma: float = Field(0.05, gt=0, description="Viscosidade")
    dt: float = Field(0.002, gt=0, description="Passo de tempo (Euler explícito)")

    @property
    def dx(self) -> float:
        return math.pi / self.m

    @property
    def dim(self) -> int:
        return self.m - 1

    @model_validator(mode="after")
    def check_stability(self):
        ratio = 12.0 * self.gamma * self.dt / self.dx**2
        if ratio >= 2.0:
            raise ValueError(f"Esquema instável: 12γδt/δx² = {ratio:.4f} >= 2 (reduza dt).")
        return self


class BurgersSpectralConfig(BaseModel):
    """Burgers viscoso em Galerkin espectral com base sin(ix), i = 1..m."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(100, ge=1, description="Número de modos senoidais")
    gamma: float = Field(0.05, gt=0, description="Viscosidade")
    dt: float = Field(0.002, gt=0, description="Passo de tempo (Euler explícito)")

    @property
    def dim(self) -> int:
        return self.m

    @model_validator(mode="after")
    def check_stability(self):
        ratio = self.gamma * self.m**2 * self.dt
        if ratio >= 2.0:
            raise ValueError(f"Esquema instável: γm²δt = {ratio:.4f} >= 2 no modo mais alto (reduza dt).")
        return self


class VorticityConfig(BaseModel):
    """Equação de vorticidade 2D com Jacobiano de Arakawa e dissipação biharmônica."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(20, ge=3, description="Pontos por eixo (interior (m-1)²)")
    dx: float = Field(0.2, gt=0, description="Espaçamento em x")
    dy: float = Field(0.2, gt=0, description="Espaçamento em y")
    dt: float = Field(0.12, gt=0, description="Passo de tempo (3·δx·δy no experimento de referência)")
    kappa: float = Field(4e-5, ge=0, description="Coeficiente biharmônico (0.001·δx·δy)")
    poisson_method: Literal["sor", "direct"] = Field("sor", description="Solver de Poisson para ψ = Δ⁻¹ω")
    sor_tol: float = Field(1e-10, gt=0, description="Tolerância absoluta do resíduo do SOR")
    sor_relax: Optional[float] = Field(None, gt=0, lt=2, description="Relaxação do SOR; padrão ótimo 2/(1+sin(π/m))")
    sor_max_sweeps: int = Field(10000, ge=1, description="Limite de varreduras do SOR")
    sor_ordering: Literal["red-black", "lexicographic"] = Field("red-black", description="Ordem de varredura do SOR")
    initial_scale: float = Field(5.0, ge=0, description="Amplitude da condição inicial aleatória ω₀ ~ escala·N(0,1)")
    truth_seed: int = Field(2024, description="Semente da condição inicial aleatória")
