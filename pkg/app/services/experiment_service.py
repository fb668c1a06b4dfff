"""
Orquestração dos experimentos gêmeos, compartilhada pela CLI, pela API HTTP
e pelas tarefas Celery: cada comando lê um RunConfig resolvido, executa e
grava os artefatos no diretório de saída.
"""
import logging
from typing import Callable, Optional

import numpy as np

from app.core.errors import AdmmFailure, ConfigError, LineSearchStall
from app.models.registry import build_model, validated
from app.models.vorticity import VorticityModel
from app.schemas.run_config import RunConfig
from app.schemas.solvers import AdmmParams, BaselineConfig
from app.services import admm_solver, baselines
from app.services.artifact_repository import ArtifactRepository
from app.services.fourdvar import (
    AssimilationProblem,
    ObservationSet,
    generate_observations,
    observation_errors,
    shooting_objective,
)
from app.services.landscape import scan_landscape, strict_local_minima
from app.services.verification import CorruptedAdjointModel, check_adjoint

logger = logging.getLogger(__name__)


class ExperimentService:
    def __init__(self, config: RunConfig, repository: Optional[ArtifactRepository] = None):
        self.config = config.resolved()
        self.N, self.q = self.config.steps()
        self.model = build_model(self.config.model, **self.config.model_params())
        self.repository = repository or ArtifactRepository(self.config.output_dir)

    def meta(self, **extra) -> dict:
        """Eco completo da configuração resolvida mais as grandezas derivadas."""
        meta = {key: value for key, value in self.config.model_dump().items() if value is not None}
        meta.update(
            {
                "N": self.N,
                "q": self.q,
                "n": self.N // self.q,
                "dim": self.model.dim,
                "norm": self.model.norm.kind,
                "objective_scaling": "mu" if self.config.solver == "admm" else "unscaled",
            }
        )
        meta.update(extra)
        return meta

    def observations(self) -> ObservationSet:
        return generate_observations(
            self.model,
            self.model.initial_state(),
            N=self.N,
            q=self.q,
            noise_std=self.config.noise_std,
            seed=self.config.seed,
            T_o=self.config.T_obs,
        )

    def problem(self, obs: Optional[ObservationSet] = None) -> AssimilationProblem:
        return AssimilationProblem(
            model=self.model,
            obs=obs or self.observations(),
            alpha=self.config.alpha,
            mu=self.config.mu,
        )

    def generate_obs(self) -> dict:
        obs = self.observations()
        files = [
            self.repository.write_observations(obs.observations, obs.q),
            self.repository.write_trajectory("truth_trajectory.csv", obs.truth),
            self.repository.write_meta(self.meta()),
        ]
        return {"files": files, "observation_count": obs.n + 1, "dim": obs.dim}

    def parse_init(self) -> admm_solver.InitMode:
        init_text = (self.config.init or "zeros").strip()
        if init_text == "zeros":
            return admm_solver.Zeros()
        if init_text == "truth":
            return admm_solver.Rollout(self.model.initial_state())
        if init_text.startswith("rollout:"):
            try:
                u0 = np.array([float(x) for x in init_text[len("rollout:"):].split(",")])
            except ValueError as e:
                raise ConfigError(f"Componentes inválidos em init: {init_text}") from e
            if u0.size != self.model.dim:
                raise ConfigError(f"init rollout com {u0.size} componentes; o modelo tem dimensão {self.model.dim}.")
            return admm_solver.Rollout(u0)
        if init_text.startswith("file:"):
            return admm_solver.Given(ArtifactRepository.read_trajectory(init_text[len("file:"):]))
        raise ConfigError(f"Modo de inicialização desconhecido: {init_text}")

    def initial_guess(self, init_mode: admm_solver.InitMode) -> np.ndarray:
        if isinstance(init_mode, admm_solver.Rollout):
            return init_mode.u0_guess
        if isinstance(init_mode, admm_solver.Given):
            return init_mode.trajectory[0]
        return np.zeros(self.model.dim)

    def solve(self, on_record: Optional[Callable] = None) -> dict:
        obs = self.observations()
        problem = self.problem(obs)
        init_mode = self.parse_init()
        if self.config.solver == "admm":
            return self._solve_admm(problem, init_mode, on_record)
        return self._solve_baseline(problem, init_mode)

    def _solve_admm(self, problem: AssimilationProblem, init_mode, on_record: Optional[Callable]) -> dict:
        config = self.config
        params = validated(
            AdmmParams,
            s=config.s,
            eta=config.eta,
            mu=config.mu,
            max_outer=config.max_iters,
            constraint_tol=config.constraint_tol,
            schedule=config.schedule,
            threads=config.threads,
            log_every=config.log_every,
        )

        def snapshot(state: admm_solver.AdmmState):
            self.repository.write_trajectory(f"trajectory_iter_{state.outer_iter:06d}.csv", state.primal)

        try:
            state, history = admm_solver.AdmmSolver(problem, params).solve(
                init_mode,
                reference=problem.obs.truth,
                on_record=on_record,
                checkpoint_every=config.checkpoint_every,
                on_checkpoint=snapshot,
            )
        except AdmmFailure as e:
            logger.error(f"ADMM interrompido: {e}")
            self.repository.write_admm_history(e.history)
            self.repository.write_meta(self.meta(status="failed"))
            raise

        final = history[-1]
        errors = observation_errors(state.primal, problem.obs.truth, problem.obs.q, problem.norm)
        extra = {
            "status": "completed",
            "sweeps": final.iter,
            "final_constraint_error": final.constraint_error,
            "final_total_error": final.total_error,
            "final_objective": final.objective,
            "final_observation_error": float(errors[-1]),
        }
        files = [
            self.repository.write_admm_history(history),
            self.repository.write_trajectory("recovered_trajectory.csv", state.primal),
            self.repository.write_meta(self.meta(**extra)),
        ]
        if isinstance(self.model, VorticityModel):
            files.append(self.repository.write_field_snapshot("recovered_final_field.csv", state.primal[-1], self.model.grid))
            files.append(self.repository.write_field_snapshot("true_final_field.csv", problem.obs.truth[-1], self.model.grid))
        return {"files": files, **extra, "recovered_u0": state.primal[0].tolist()}

    def _solve_baseline(self, problem: AssimilationProblem, init_mode) -> dict:
        config = self.config
        cfg = validated(
            BaselineConfig,
            method=config.solver,
            max_iters=config.max_iters,
            initial_step=config.initial_step,
            shrink=config.shrink,
            sufficient_decrease=config.sufficient_decrease,
            grad_tol=config.grad_tol,
        )
        u0 = self.initial_guess(init_mode)
        runner = baselines.gradient_descent if cfg.method == "gd" else baselines.nonlinear_cg
        try:
            u0_final, history = runner(u0, problem, cfg)
        except LineSearchStall as e:
            logger.error(f"Baseline {cfg.method} estagnou: {e}")
            self.repository.write_baseline_history(e.history)
            self.repository.write_meta(self.meta(status="stalled", final_u0=",".join(f"{x:.17g}" for x in e.u0)))
            raise

        trajectory = self.model.rollout(u0_final, self.N)
        extra = {
            "status": "completed",
            "iterations": history[-1].iter,
            "final_objective": history[-1].objective,
            "final_grad_norm": history[-1].grad_norm,
            "final_u0": ",".join(f"{x:.17g}" for x in u0_final),
        }
        files = [
            self.repository.write_baseline_history(history),
            self.repository.write_trajectory("recovered_trajectory.csv", trajectory),
            self.repository.write_meta(self.meta(**extra)),
        ]
        return {"files": files, **extra, "recovered_u0": u0_final.tolist()}

    def check_adjoint(self):
        model = CorruptedAdjointModel(self.model) if self.config.corrupt_adjoint else self.model
        report = check_adjoint(model, trials=self.config.trials, seed=self.config.check_seed, raise_on_failure=False)
        self.repository.write_report("adjoint_report.csv", report.as_dict())
        return report

    def landscape(self) -> dict:
        config = self.config
        obs = self.observations()
        problem = self.problem(obs)
        box = ((config.x_min, config.x_max), (config.y_min, config.y_max), (config.z_min, config.z_max))
        result = scan_landscape(problem, box=box, resolution=config.resolution, threads=config.threads)
        point, value = result.minimum()
        middle = result.values.shape[2] // 2
        extra = {
            "landscape_min_point": ",".join(f"{x:.17g}" for x in point),
            "landscape_min_value": value,
            "landscape_local_minima_mid_z": len(strict_local_minima(result.values[:, :, middle])),
            "true_u0_objective": shooting_objective(self.model.initial_state(), problem),
        }
        files = [
            self.repository.write_landscape(result.rows()),
            self.repository.write_meta(self.meta(**extra)),
        ]
        return {"files": files, **extra}
