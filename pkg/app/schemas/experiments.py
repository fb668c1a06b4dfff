from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ExperimentResult(BaseModel):
    """Resposta dos comandos síncronos: artefatos gravados e métricas finais."""
    command: str = Field(..., description="Comando executado")
    output_dir: str = Field(..., description="Diretório dos artefatos")
    files: List[str] = Field(default_factory=list, description="Arquivos gravados")
    summary: Dict[str, Any] = Field(default_factory=dict, description="Métricas finais da execução")


class AdjointCheckResponse(BaseModel):
    model: str = Field(..., description="Modelo verificado")
    trials: int = Field(..., description="Triplas aleatórias testadas")
    dot_product_error: float = Field(..., description="Maior erro relativo do teste do produto interno")
    tangent_error: float = Field(..., description="Maior erro relativo da tangente por diferenças finitas")
    dot_product_threshold: float = Field(..., description="Limite do produto interno")
    tangent_threshold: float = Field(..., description="Limite da tangente")
    passed: bool = Field(..., description="Indica se ambos os testes passaram")


class RunStatus(BaseModel):
    run_id: str = Field(..., description="Identificador da execução em segundo plano")
    status: str = Field(..., description="queued | running | completed | failed")
    detail: Optional[str] = Field(None, description="Mensagem de erro, se houver")
    summary: Dict[str, Any] = Field(default_factory=dict, description="Métricas finais ou progresso")
