import asyncio
import logging
import uuid

from fastapi import APIRouter, HTTPException

from app.core.errors import AssimilationError, ConfigError, DimensionGuardError
from app.schemas.experiments import AdjointCheckResponse, ExperimentResult, RunStatus
from app.schemas.run_config import RunConfig
from app.services.experiment_service import ExperimentService
from app.services.run_status_repository import RunStatusRepository
from app.utils.celery_app import celery_app  # noqa: F401
from app.utils.tasks import run_solve_task

router = APIRouter(prefix="/experiments", tags=["Experiments"])
logger = logging.getLogger("uvicorn.error")

status_repo = RunStatusRepository()


def raise_http(e: AssimilationError):
    if isinstance(e, DimensionGuardError):
        raise HTTPException(status_code=422, detail=str(e))
    if isinstance(e, ConfigError):
        raise HTTPException(status_code=400, detail=str(e))
    logger.error(f"Erro na execução do experimento: {e}")
    raise HTTPException(status_code=500, detail=str(e))


async def run_command(command: str, config: RunConfig) -> ExperimentResult:
    try:
        service = ExperimentService(config)
        result = await asyncio.to_thread(getattr(service, command.replace("-", "_")))
    except AssimilationError as e:
        raise_http(e)
    files = result.pop("files", [])
    result.pop("recovered_u0", None)
    return ExperimentResult(command=command, output_dir=service.config.output_dir, files=files, summary=result)


@router.post("/generate-obs", response_model=ExperimentResult)
async def generate_obs(config: RunConfig):
    return await run_command("generate-obs", config)


@router.post("/solve", response_model=ExperimentResult)
async def solve(config: RunConfig):
    return await run_command("solve", config)


@router.post("/landscape", response_model=ExperimentResult)
async def landscape(config: RunConfig):
    return await run_command("landscape", config)


@router.post("/check-adjoint", response_model=AdjointCheckResponse)
async def check_adjoint(config: RunConfig):
    try:
        service = ExperimentService(config)
        report = await asyncio.to_thread(service.check_adjoint)
    except AssimilationError as e:
        raise_http(e)
    return AdjointCheckResponse(**report.as_dict())


@router.post("/solve-async", response_model=RunStatus, status_code=202)
async def solve_async(config: RunConfig):
    """
    Enfileira a solução numa tarefa Celery e devolve o identificador da execução.
    """
    try:
        config.resolved()
    except AssimilationError as e:
        raise_http(e)
    run_id = uuid.uuid4().hex
    status_repo.set_status(run_id, {"status": "queued"})
    run_solve_task.delay(run_id, config.model_dump(exclude_none=True))
    logger.info(f"Execução {run_id} enfileirada para o modelo {config.model}")
    return RunStatus(run_id=run_id, status="queued")


@router.get("/runs/{run_id}", response_model=RunStatus)
def get_run_status(run_id: str):
    state = status_repo.get_status(run_id)
    if not state:
        raise HTTPException(status_code=404, detail="Execução não encontrada ou expirou")
    return RunStatus(run_id=run_id, **state)


@router.delete("/runs/{run_id}")
def delete_run_status(run_id: str):
    """Remove o estado de uma execução do Redis; os artefatos em disco ficam."""
    if not status_repo.get_status(run_id):
        raise HTTPException(status_code=404, detail="Execução não encontrada ou expirou")
    status_repo.delete_status(run_id)
    return {"status": "success", "message": f"Estado da execução {run_id} removido"}
