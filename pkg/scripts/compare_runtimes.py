"""
Compara o tempo de parede do ADMM nas três discretizações de Burgers com o
mesmo número de varreduras e imprime uma tabela.

    python -m scripts.compare_runtimes [varreduras]
"""
import logging
import sys
import time

import numpy as np

from app.core.config import settings
from app.models.registry import validated
from app.schemas.run_config import RunConfig
from app.schemas.solvers import AdmmParams
from app.services import admm_solver
from app.services.experiment_service import ExperimentService

logger = logging.getLogger(__name__)

SCHEMES = ("burgers-fd", "burgers-fem", "burgers-spectral")


def time_scheme(model: str, sweeps: int) -> dict:
    service = ExperimentService(RunConfig(model=model, max_iters=sweeps))
    problem = service.problem()
    params = validated(
        AdmmParams,
        s=service.config.s,
        eta=service.config.eta,
        mu=service.config.mu,
        max_outer=sweeps,
        threads=service.config.threads,
        log_every=max(sweeps, 1),
    )
    start = time.perf_counter()
    state, history = admm_solver.solve(problem, params, admm_solver.Zeros())
    elapsed = time.perf_counter() - start
    final_miss = state.primal[-1] - problem.obs.truth[-1]
    return {
        "model": model,
        "N": service.N,
        "dim": service.model.dim,
        "quadratic_terms": service.model.quadratic_term_count(),
        "seconds": elapsed,
        "constraint_error": history[-1].constraint_error,
        "constraint_ratio": history[-1].constraint_error / history[min(1, len(history) - 1)].constraint_error,
        "final_observation_rms": float(np.sqrt(np.mean(final_miss**2))),
    }


def main():
    logging.basicConfig(level=settings.LOG_LEVEL)
    sweeps = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    rows = [time_scheme(model, sweeps) for model in SCHEMES]
    print(
        f"{'esquema':<18}{'N':>6}{'dim':>6}{'termos quad.':>14}{'tempo (s)':>12}"
        f"{'restrição':>14}{'razão':>12}{'RMS final':>12}"
    )
    for row in rows:
        print(
            f"{row['model']:<18}{row['N']:>6}{row['dim']:>6}{row['quadratic_terms']:>14}"
            f"{row['seconds']:>12.3f}{row['constraint_error']:>14.3e}"
            f"{row['constraint_ratio']:>12.3e}{row['final_observation_rms']:>12.4f}"
        )


if __name__ == "__main__":
    main()
