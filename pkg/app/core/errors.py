from typing import Optional


class AssimilationError(Exception):
    """
    Erro base do pacote. Cada subclasse define o código de saída da CLI.
    """
    exit_code: int = 1


class ConfigError(AssimilationError, ValueError):
    """Configuração inválida: chave desconhecida, ausente ou valor fora do domínio."""
    exit_code = 2


class DimensionGuardError(ConfigError):
    """Operação restrita a modelos de dimensão pequena (ex.: varredura da paisagem)."""


class SolverFailure(AssimilationError, RuntimeError):
    """Falha de um solver linear direto (pivô singular)."""
    exit_code = 3


class NonconvergenceError(SolverFailure):
    """
    Solver iterativo atingiu o limite de iterações antes da tolerância.
    Guarda o resíduo alcançado.
    """

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class LineSearchStall(SolverFailure):
    """
    A busca linear não encontrou decréscimo suficiente.
    Guarda o último iterado e o histórico parcial.
    """

    def __init__(self, message: str, u0, history: Optional[list] = None):
        super().__init__(message)
        self.u0 = u0
        self.history = history or []


class AdmmFailure(SolverFailure):
    """Falha durante as varreduras do ADMM; guarda o histórico parcial."""

    def __init__(self, message: str, history: Optional[list] = None):
        super().__init__(message)
        self.history = history or []


class ArtifactIOError(AssimilationError):
    """Falha de leitura/escrita de artefatos (CSV, meta)."""
    exit_code = 4

    def __init__(self, message: str, path: str):
        super().__init__(message)
        self.path = path


class VerificationFailure(AssimilationError):
    """Algum teste de produto interno ou diferença finita excedeu o limite."""
    exit_code = 5

    def __init__(self, message: str, test_name: str, value: float, threshold: float):
        super().__init__(message)
        self.test_name = test_name
        self.value = value
        self.threshold = threshold
