from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class AdmmParams(BaseModel):
    """Parâmetros do ADMM multibloco linearizado com regularização proximal."""
    model_config = ConfigDict(frozen=True)

    s: float = Field(2.0 / 3.0, gt=0, description="Parâmetro de penalidade")
    eta: float = Field(0.1, gt=0, description="Regularização proximal")
    mu: float = Field(100.0, gt=0, description="Escala dos termos de dados")
    max_outer: int = Field(600, ge=0, description="Número máximo de varreduras externas")
    constraint_tol: Optional[float] = Field(None, gt=0, description="Para quando o erro de restrição cair abaixo deste valor")
    schedule: Literal["jacobi", "gauss-seidel"] = Field(
        "jacobi", description="Ordem das atualizações primais; gauss-seidel é experimental"
    )
    threads: int = Field(1, ge=1, description="Trabalhadores para as atualizações primais")
    cg_tol: float = Field(1e-10, gt=0, description="Tolerância relativa do CG nos subproblemas em norma de energia")
    log_every: int = Field(50, ge=1, description="Intervalo de log de progresso (varreduras)")
    prox_backtrack: Optional[float] = Field(
        0.5, gt=0, lt=1, description="Redução de η por bloco quando a majoração do termo linearizado falha; None desliga"
    )
    coupling_factor: float = Field(2.0, ge=1.0, description="Folga da majoração: blocos vizinhos mudam juntos na varredura")
    max_backtracks: int = Field(30, ge=1, description="Reduções de η por bloco e varredura")


class BaselineConfig(BaseModel):
    """Métodos de tiro de primeira ordem com gradiente adjunto e busca de Armijo."""
    model_config = ConfigDict(frozen=True)

    method: Literal["gd", "cg-fr", "cg-pr"] = Field("cg-pr", description="Método de descida")
    max_iters: int = Field(200, ge=0, description="Número máximo de iterações")
    initial_step: float = Field(1.0, gt=0, description="Passo inicial da busca linear")
    shrink: float = Field(0.5, gt=0, lt=1, description="Fator de redução do passo")
    sufficient_decrease: float = Field(1e-4, gt=0, le=0.5, description="Constante de Armijo")
    grad_tol: float = Field(1e-8, ge=0, description="Tolerância na norma do gradiente")
    max_halvings: int = Field(60, ge=1, description="Reduções de passo antes de declarar estagnação")
