"""
ADMM multibloco linearizado com regularização proximal para o 4D-Var.

Cada varredura externa atualiza todos os blocos primais u_0..u_N a partir do
iterado ℓ (esquema de Jacobi, paralelizável em k) e depois os multiplicadores
λ_0..λ_{N-1} a partir do novo primal.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

import numpy as np

from app.core.errors import AdmmFailure, AssimilationError, ConfigError
from app.schemas.solvers import AdmmParams
from app.services.fourdvar import AssimilationProblem, total_error, total_objective
from app.utils.numerics import cg_spd_solve

logger = logging.getLogger(__name__)


@dataclass
class AdmmState:
    primal: np.ndarray
    duals: np.ndarray
    outer_iter: int = 0
    forecasts: Optional[np.ndarray] = None
    etas: Optional[np.ndarray] = None


@dataclass
class IterationRecord:
    iter: int
    total_error: Optional[float]
    constraint_error: float
    objective: float


@dataclass(frozen=True)
class Zeros:
    pass


@dataclass(frozen=True)
class Rollout:
    u0_guess: np.ndarray


@dataclass(frozen=True)
class Given:
    trajectory: np.ndarray


InitMode = Union[Zeros, Rollout, Given]


def _map(fn: Callable, items, threads: int) -> list:
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(fn, items))
    return [fn(item) for item in items]


def compute_forecasts(primal: np.ndarray, problem: AssimilationProblem, threads: int = 1) -> np.ndarray:
    model = problem.model
    steps = _map(model.step, primal[:-1], threads)
    return np.array(steps).reshape(len(primal) - 1, model.dim)


def init_state(problem: AssimilationProblem, init_mode: InitMode, threads: int = 1) -> AdmmState:
    N, dim = problem.N, problem.model.dim
    if N < 1:
        raise ConfigError("O ADMM exige N >= 1 passos.")
    if isinstance(init_mode, Zeros):
        primal = np.zeros((N + 1, dim))
    elif isinstance(init_mode, Rollout):
        primal = problem.model.rollout(np.asarray(init_mode.u0_guess, dtype=float), N)
    elif isinstance(init_mode, Given):
        primal = np.array(init_mode.trajectory, dtype=float)
        if primal.shape != (N + 1, dim):
            raise ConfigError(f"Trajetória inicial com forma {primal.shape}, esperado {(N + 1, dim)}.")
    else:
        raise ConfigError(f"Modo de inicialização desconhecido: {init_mode!r}")
    return AdmmState(
        primal=primal,
        duals=np.zeros((N, dim)),
        outer_iter=0,
        forecasts=compute_forecasts(primal, problem, threads),
    )


def _forecasts(state: AdmmState, problem: AssimilationProblem) -> np.ndarray:
    if state.forecasts is None:
        state.forecasts = compute_forecasts(state.primal, problem)
    return state.forecasts


def _eta(k: int, state: AdmmState, params: AdmmParams, eta: Optional[float]) -> float:
    if eta is not None:
        return eta
    if state.etas is not None:
        return float(state.etas[k])
    return params.eta


def linearized_gradient(k: int, state: AdmmState, problem: AssimilationProblem, params: AdmmParams) -> np.ndarray:
    """g_k = ∇H(u_k)ᵀ(u_{k+1} − H(u_k) − sλ_k)."""
    forecasts = _forecasts(state, problem)
    residual = state.primal[k + 1] - forecasts[k] - params.s * state.duals[k]
    return problem.model.adjoint(state.primal[k], residual)


def primal_update_first(
    state: AdmmState, problem: AssimilationProblem, params: AdmmParams, eta: Optional[float] = None
) -> np.ndarray:
    """
    Minimiza μf₀(u) − (1/s)⟨g₀, u⟩ + ‖u − u₀^ℓ‖²/(2η).
    Na norma de energia, multiplica a estacionariedade por K = −Δ_h e resolve por CG.
    """
    s, mu = params.s, params.mu
    eta = _eta(0, state, params, eta)
    T_o, alpha = problem.obs.T_o, problem.alpha
    u_prev = state.primal[0]
    g = linearized_gradient(0, state, problem, params)
    target = problem.obs.observations[0]
    background = problem.obs.background

    if problem.norm.is_euclidean:
        numerator = mu * T_o * target + mu * alpha * background + u_prev / eta + g / s
        return numerator / (mu * T_o + mu * alpha + 1.0 / eta)

    K = problem.norm.inv_weight
    rhs = mu * (T_o * target + alpha * background) + K(u_prev / eta + g / s)
    return cg_spd_solve(lambda x: mu * (T_o + alpha) * x + K(x) / eta, rhs, tol=params.cg_tol)


def _penalized_update(
    weight: float,
    target: Optional[np.ndarray],
    a: np.ndarray,
    u_prev: np.ndarray,
    g: Optional[np.ndarray],
    problem: AssimilationProblem,
    params: AdmmParams,
    eta: float,
) -> np.ndarray:
    s = params.s
    pull = a / s + u_prev / eta
    if g is not None:
        pull = pull + g / s
    if weight == 0.0:
        return pull / (1.0 / s + 1.0 / eta)
    if problem.norm.is_euclidean:
        return (weight * target + pull) / (weight + 1.0 / s + 1.0 / eta)

    K = problem.norm.inv_weight
    shift = 1.0 / s + 1.0 / eta
    rhs = weight * target + K(pull)
    return cg_spd_solve(lambda x: weight * x + shift * K(x), rhs, tol=params.cg_tol)


def _observation_weight(k: int, problem: AssimilationProblem, params: AdmmParams):
    index = problem.observation_index(k)
    if index is None:
        return 0.0, None
    return params.mu * problem.obs.T_o, problem.obs.observations[index]


def primal_update_interior(
    k: int, state: AdmmState, problem: AssimilationProblem, params: AdmmParams, eta: Optional[float] = None
) -> np.ndarray:
    if not 1 <= k <= problem.N - 1:
        raise ConfigError(f"Índice interior fora de 1..N-1: {k}")
    forecasts = _forecasts(state, problem)
    a = forecasts[k - 1] + params.s * state.duals[k - 1]
    g = linearized_gradient(k, state, problem, params)
    weight, target = _observation_weight(k, problem, params)
    return _penalized_update(weight, target, a, state.primal[k], g, problem, params, _eta(k, state, params, eta))


def primal_update_last(
    state: AdmmState, problem: AssimilationProblem, params: AdmmParams, eta: Optional[float] = None
) -> np.ndarray:
    N = problem.N
    forecasts = _forecasts(state, problem)
    a = forecasts[N - 1] + params.s * state.duals[N - 1]
    weight, target = _observation_weight(N, problem, params)
    return _penalized_update(weight, target, a, state.primal[N], None, problem, params, _eta(N, state, params, eta))


def primal_update(
    k: int, state: AdmmState, problem: AssimilationProblem, params: AdmmParams, eta: Optional[float] = None
) -> np.ndarray:
    if k == 0:
        return primal_update_first(state, problem, params, eta)
    if k == problem.N:
        return primal_update_last(state, problem, params, eta)
    return primal_update_interior(k, state, problem, params, eta)


def dual_update(state: AdmmState, problem: AssimilationProblem, params: AdmmParams) -> np.ndarray:
    """λ_k ← λ_k − (1/s)(u_{k+1} − H(u_k)), com o primal já avançado."""
    forecasts = _forecasts(state, problem)
    return state.duals - (state.primal[1:] - forecasts) / params.s


def block_update(k: int, state: AdmmState, problem: AssimilationProblem, params: AdmmParams) -> tuple:
    """
    Atualiza o bloco k e devolve (u_k, H(u_k) ou None, η_k). Nos blocos com termo
    linearizado, η_k é reduzido até valer a majoração
    c·‖H(u) − H(u^ℓ)‖²/s ≤ ‖u − u^ℓ‖²/η_k, com c = coupling_factor.
    """
    eta = _eta(k, state, params, None)
    u = primal_update(k, state, problem, params, eta)
    if k == problem.N:
        return u, None, eta

    forecast = problem.model.step(u)
    if params.prox_backtrack is None:
        return u, forecast, eta
    forecasts = _forecasts(state, problem)
    for _ in range(params.max_backtracks):
        moved = float(np.sum((u - state.primal[k]) ** 2))
        pushed = float(np.sum((forecast - forecasts[k]) ** 2))
        if not (np.isfinite(moved) and np.isfinite(pushed)):
            break
        if params.coupling_factor * pushed / params.s <= moved / eta:
            break
        eta *= params.prox_backtrack
        u = primal_update(k, state, problem, params, eta)
        forecast = problem.model.step(u)
    else:
        logger.warning(f"Bloco {k}: majoração não atingida após {params.max_backtracks} reduções (η={eta:.3e}).")
    return u, forecast, eta


def _current_etas(state: AdmmState, problem: AssimilationProblem, params: AdmmParams) -> np.ndarray:
    if state.etas is None:
        return np.full(problem.N + 1, params.eta)
    return state.etas.copy()


def outer_iteration(state: AdmmState, problem: AssimilationProblem, params: AdmmParams) -> AdmmState:
    _forecasts(state, problem)
    if params.schedule == "gauss-seidel":
        primal, forecasts, etas = _gauss_seidel_sweep(state, problem, params)
    else:
        updates = _map(lambda k: block_update(k, state, problem, params), range(problem.N + 1), params.threads)
        primal = np.array([u for u, _, _ in updates])
        forecasts = np.array([forecast for _, forecast, _ in updates[:-1]]).reshape(problem.N, problem.model.dim)
        etas = np.array([eta for _, _, eta in updates])
    shrunk = int(np.count_nonzero(etas < _current_etas(state, problem, params)))
    if shrunk:
        logger.debug(f"Varredura {state.outer_iter + 1}: η reduzido em {shrunk} blocos (mínimo {etas.min():.3e}).")
    advanced = AdmmState(
        primal=primal, duals=state.duals, outer_iter=state.outer_iter + 1, forecasts=forecasts, etas=etas
    )
    advanced.duals = dual_update(advanced, problem, params)
    return advanced


def _gauss_seidel_sweep(state: AdmmState, problem: AssimilationProblem, params: AdmmParams):
    # variante experimental: cada bloco lê os vizinhos já atualizados na mesma varredura
    working = AdmmState(
        primal=state.primal.copy(),
        duals=state.duals,
        outer_iter=state.outer_iter,
        forecasts=state.forecasts.copy(),
        etas=_current_etas(state, problem, params),
    )
    for k in range(problem.N + 1):
        u, forecast, eta = block_update(k, working, problem, params)
        working.primal[k] = u
        working.etas[k] = eta
        if forecast is not None:
            working.forecasts[k] = forecast
    return working.primal, working.forecasts, working.etas


def record_of(state: AdmmState, problem: AssimilationProblem, reference: Optional[np.ndarray]) -> IterationRecord:
    forecasts = _forecasts(state, problem)
    return IterationRecord(
        iter=state.outer_iter,
        total_error=None if reference is None else total_error(state.primal, reference),
        constraint_error=float(np.sum((state.primal[1:] - forecasts) ** 2)),
        objective=total_objective(state.primal, problem),
    )


class AdmmSolver:
    def __init__(self, problem: AssimilationProblem, params: AdmmParams):
        self.problem = problem
        self.params = params

    def solve(
        self,
        init_mode: InitMode,
        reference: Optional[np.ndarray] = None,
        on_record: Optional[Callable[[IterationRecord], None]] = None,
        checkpoint_every: Optional[int] = None,
        on_checkpoint: Optional[Callable[[AdmmState], None]] = None,
    ) -> tuple:
        """
        Executa até max_outer varreduras ou até o erro de restrição atingir
        constraint_tol. Devolve (estado final, histórico) com um registro
        inicial (iter 0) e um por varredura.
        """
        params = self.params
        history: List[IterationRecord] = []
        state = init_state(self.problem, init_mode, params.threads)
        self._append(history, record_of(state, self.problem, reference), on_record)
        logger.info(
            f"ADMM iniciado: modelo={self.problem.model.name}, N={self.problem.N}, s={params.s:.6g}, "
            f"η={params.eta}, μ={params.mu}, varreduras={params.max_outer}, esquema={params.schedule}"
        )

        for sweep in range(1, params.max_outer + 1):
            try:
                state = outer_iteration(state, self.problem, params)
            except AssimilationError as e:
                logger.error(f"Erro na varredura {sweep} do ADMM: {e}")
                raise AdmmFailure(f"ADMM falhou na varredura {sweep}: {e}", history=history) from e
            if not (np.all(np.isfinite(state.primal)) and np.all(np.isfinite(state.duals))):
                logger.error(f"ADMM divergiu na varredura {sweep} (valores não finitos).")
                raise AdmmFailure(f"ADMM divergiu na varredura {sweep}: valores não finitos.", history=history)

            record = record_of(state, self.problem, reference)
            self._append(history, record, on_record)
            if checkpoint_every and on_checkpoint is not None and sweep % checkpoint_every == 0:
                on_checkpoint(state)
            if sweep % params.log_every == 0:
                logger.info(
                    f"ADMM varredura {sweep}: restrição={record.constraint_error:.6e}, "
                    f"objetivo={record.objective:.6e}, erro total={record.total_error}"
                )
            else:
                logger.debug(f"ADMM varredura {sweep}: restrição={record.constraint_error:.6e}")
            if params.constraint_tol is not None and record.constraint_error <= params.constraint_tol:
                logger.info(f"ADMM convergiu na varredura {sweep} (restrição <= {params.constraint_tol}).")
                break

        return state, history

    @staticmethod
    def _append(history: list, record: IterationRecord, on_record: Optional[Callable]):
        history.append(record)
        if on_record is not None:
            on_record(record)


def solve(
    problem: AssimilationProblem,
    params: AdmmParams,
    init_mode: InitMode,
    reference: Optional[np.ndarray] = None,
) -> tuple:
    return AdmmSolver(problem, params).solve(init_mode, reference)
