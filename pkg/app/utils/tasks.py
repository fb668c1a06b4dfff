import logging
from typing import Dict

from celery import shared_task

from app.core.errors import AssimilationError
from app.models.registry import validated
from app.schemas.run_config import RunConfig
from app.services.experiment_service import ExperimentService
from app.services.run_status_repository import RunStatusRepository

logger = logging.getLogger(__name__)

status_repo = RunStatusRepository()


@shared_task
def run_solve_task(run_id: str, config: Dict):
    """
    Tarefa Celery que executa `solve` e publica o progresso em `run:{run_id}`.
    O progresso é atualizado no mesmo intervalo do log (`log_every`).
    """
    try:
        service = ExperimentService(validated(RunConfig, **config))
    except AssimilationError as e:
        logger.error(f"Configuração inválida na execução {run_id}: {e}")
        status_repo.set_status(run_id, {"status": "failed", "detail": str(e)})
        return

    log_every = service.config.log_every

    def on_record(record):
        if record.iter % log_every == 0:
            status_repo.set_status(
                run_id,
                {"status": "running", "summary": {"iter": record.iter, "constraint_error": record.constraint_error}},
            )

    status_repo.set_status(run_id, {"status": "running"})
    try:
        result = service.solve(on_record=on_record)
    except AssimilationError as e:
        logger.error(f"Execução {run_id} falhou: {e}")
        status_repo.set_status(run_id, {"status": "failed", "detail": str(e)})
        return

    result.pop("recovered_u0", None)
    status_repo.set_status(run_id, {"status": "completed", "summary": result})
    logger.info(f"Execução {run_id} concluída em {service.config.output_dir}")
