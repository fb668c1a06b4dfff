"""
Operações numéricas compartilhadas por todos os modelos: matrizes tridiagonais,
Laplaciano de 5 pontos com Dirichlet nulo, SOR, gradiente conjugado e o gerador
gaussiano reprodutível usado na geração de observações.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as splinalg
from scipy.special import ndtri

from app.core.errors import ConfigError, NonconvergenceError, SolverFailure

logger = logging.getLogger(__name__)

SINGULAR_PIVOT = 1e-14


@dataclass(frozen=True)
class Grid2D:
    """
    Malha uniforme com m pontos por eixo; os valores vivem nos (m-1)^2 pontos
    interiores, achatados em ordem row-major (eixo 0 = x, eixo 1 = y).
    """
    m: int
    dx: float
    dy: float

    def __post_init__(self):
        if self.m < 3:
            raise ConfigError(f"Grid2D exige m >= 3 (recebido {self.m}).")
        if self.dx <= 0 or self.dy <= 0:
            raise ConfigError(f"Espaçamentos devem ser positivos (dx={self.dx}, dy={self.dy}).")

    @property
    def n(self) -> int:
        return self.m - 1

    @property
    def shape(self) -> tuple:
        return (self.n, self.n)

    @property
    def interior_dim(self) -> int:
        return self.n * self.n

    def as_field(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.size != self.interior_dim:
            raise ConfigError(
                f"Campo com {values.size} valores não corresponde à malha interior {self.shape}."
            )
        return values.reshape(self.shape)


@dataclass(frozen=True)
class TridiagonalMatrix:
    lower: np.ndarray
    diagonal: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        size = len(self.diagonal)
        if size < 1:
            raise ConfigError("Matriz tridiagonal vazia.")
        if len(self.lower) != size - 1 or len(self.upper) != size - 1:
            raise ConfigError(
                f"Diagonais secundárias devem ter tamanho {size - 1} "
                f"(lower={len(self.lower)}, upper={len(self.upper)})."
            )

    @classmethod
    def constant(cls, size: int, lower: float, diagonal: float, upper: float) -> "TridiagonalMatrix":
        return cls(
            lower=np.full(size - 1, float(lower)),
            diagonal=np.full(size, float(diagonal)),
            upper=np.full(size - 1, float(upper)),
        )

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diagonal * x
        y[1:] += self.lower * x[:-1]
        y[:-1] += self.upper * x[1:]
        return y

    def transpose(self) -> "TridiagonalMatrix":
        return TridiagonalMatrix(lower=self.upper, diagonal=self.diagonal, upper=self.lower)

    def scaled(self, factor: float) -> "TridiagonalMatrix":
        return TridiagonalMatrix(
            lower=factor * self.lower, diagonal=factor * self.diagonal, upper=factor * self.upper
        )

    def __add__(self, other: "TridiagonalMatrix") -> "TridiagonalMatrix":
        return TridiagonalMatrix(
            lower=self.lower + other.lower,
            diagonal=self.diagonal + other.diagonal,
            upper=self.upper + other.upper,
        )

    def to_banded(self) -> np.ndarray:
        ab = np.zeros((3, self.size))
        ab[0, 1:] = self.upper
        ab[1] = self.diagonal
        ab[2, :-1] = self.lower
        return ab

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.lower, -1) + np.diag(self.upper, 1)


def tridiagonal_solve(A: TridiagonalMatrix, b: np.ndarray) -> np.ndarray:
    """
    Resolve Ax = b por eliminação em banda (LAPACK gbsv).
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (A.size,):
        raise ConfigError(f"Lado direito com forma {b.shape} incompatível com a matriz de ordem {A.size}.")
    if A.size == 1:
        if abs(A.diagonal[0]) <= SINGULAR_PIVOT:
            raise SolverFailure("Pivô singular na solução tridiagonal.")
        return b / A.diagonal
    try:
        x = linalg.solve_banded((1, 1), A.to_banded(), b)
    except linalg.LinAlgError as e:
        raise SolverFailure(f"Pivô singular na solução tridiagonal: {e}") from e
    if not np.all(np.isfinite(x)):
        raise SolverFailure("Solução tridiagonal não finita (pivô praticamente nulo).")
    return x


def laplacian_apply(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """
    Laplaciano de 5 pontos com camada fantasma nula (Dirichlet homogêneo).
    Recebe e devolve o vetor achatado dos pontos interiores.
    """
    field = grid.as_field(values)
    padded = np.pad(field, 1)
    lap = (padded[2:, 1:-1] - 2.0 * field + padded[:-2, 1:-1]) / grid.dx**2
    lap += (padded[1:-1, 2:] - 2.0 * field + padded[1:-1, :-2]) / grid.dy**2
    return lap.ravel()


def laplacian_matrix(grid: Grid2D) -> sparse.csr_matrix:
    n = grid.n
    second_diff = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n))
    eye = sparse.identity(n)
    return (sparse.kron(second_diff, eye) / grid.dx**2 + sparse.kron(eye, second_diff) / grid.dy**2).tocsr()


def optimal_sor_relax(m: int) -> float:
    return 2.0 / (1.0 + math.sin(math.pi / m))


def sor_poisson_solve(
    rhs: np.ndarray,
    grid: Grid2D,
    relax: Optional[float] = None,
    tol: float = 1e-10,
    max_sweeps: int = 10000,
    ordering: str = "red-black",
) -> np.ndarray:
    """
    Resolve Δ_h ψ = rhs com ψ = 0 na fronteira por sobre-relaxação sucessiva.

    A ordenação padrão é red-black (cada meia-varredura vetorizada, ordem
    determinística); "lexicographic" percorre os pontos linha a linha.
    O critério de parada é o resíduo ‖Δ_h ψ − rhs‖_∞ ≤ tol.
    """
    relax = optimal_sor_relax(grid.m) if relax is None else relax
    if not 0.0 < relax < 2.0:
        raise ConfigError(f"Parâmetro de relaxação deve estar em (0, 2) (recebido {relax}).")
    if ordering not in ("red-black", "lexicographic"):
        raise ConfigError(f"Ordenação SOR desconhecida: {ordering}")

    f = grid.as_field(rhs).copy()
    n = grid.n
    cx, cy = 1.0 / grid.dx**2, 1.0 / grid.dy**2
    diag = 2.0 * (cx + cy)
    padded = np.zeros((n + 2, n + 2))
    inner = padded[1:-1, 1:-1]

    residual = float(np.max(np.abs(f))) if f.size else 0.0
    if residual <= tol:
        return np.zeros(grid.interior_dim)

    if ordering == "red-black":
        ii, jj = np.indices(grid.shape)
        colors = ((ii + jj) % 2 == 0, (ii + jj) % 2 == 1)

    for sweep in range(1, max_sweeps + 1):
        if ordering == "red-black":
            for mask in colors:
                gauss_seidel = (
                    (padded[2:, 1:-1] + padded[:-2, 1:-1]) * cx
                    + (padded[1:-1, 2:] + padded[1:-1, :-2]) * cy
                    - f
                ) / diag
                inner[mask] += relax * (gauss_seidel[mask] - inner[mask])
        else:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    gs = (
                        (padded[i + 1, j] + padded[i - 1, j]) * cx
                        + (padded[i, j + 1] + padded[i, j - 1]) * cy
                        - f[i - 1, j - 1]
                    ) / diag
                    padded[i, j] += relax * (gs - padded[i, j])

        residual = float(np.max(np.abs(laplacian_apply(inner, grid) - f.ravel())))
        if residual <= tol:
            logger.debug(f"SOR convergiu em {sweep} varreduras (resíduo {residual:.3e}).")
            return inner.ravel().copy()

    raise NonconvergenceError(
        f"SOR não convergiu em {max_sweeps} varreduras (resíduo {residual:.3e} > {tol:.1e}).",
        residual=residual,
        iterations=max_sweeps,
    )


def cg_spd_solve(apply_A: Callable[[np.ndarray], np.ndarray], b: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    Gradiente conjugado para operadores simétricos positivos definidos,
    com limite de 2·dim iterações e critério ‖Ax − b‖ ≤ tol·‖b‖.
    """
    b = np.asarray(b, dtype=float)
    dim = b.size
    operator = splinalg.LinearOperator((dim, dim), matvec=apply_A, dtype=float)
    x, info = splinalg.cg(operator, b, rtol=tol, atol=0.0, maxiter=2 * dim)
    if info != 0:
        residual = float(np.linalg.norm(apply_A(x) - b))
        raise NonconvergenceError(
            f"Gradiente conjugado não convergiu em {2 * dim} iterações (resíduo {residual:.3e}).",
            residual=residual,
            iterations=2 * dim,
        )
    return x


class RandomStream:
    """
    Fluxo gaussiano reprodutível: gerador Philox (baseado em contador) e
    transformação pela inversa da CDF normal, u = (bits53 + 1/2)·2^-53,
    ε = Φ^{-1}(u). A mesma semente e a mesma ordem de sorteio produzem a
    mesma sequência em qualquer plataforma.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._bit_generator = np.random.Philox(self.seed)

    def draw(self, count: int) -> np.ndarray:
        return gaussian_draw(self, count)


def gaussian_draw(stream: RandomStream, count: int) -> np.ndarray:
    if count < 0:
        raise ConfigError(f"Quantidade de amostras negativa: {count}")
    if count == 0:
        return np.empty(0)
    raw = stream._bit_generator.random_raw(count)
    uniform = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(uniform)
