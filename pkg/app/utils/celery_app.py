# app/utils/celery_app.py

from celery import Celery
import logging

from app.core.config import settings

# Configurar logging
logging.basicConfig(level=settings.LOG_LEVEL)
logger = logging.getLogger(__name__)

logger.info(f"Configuração do Celery - Broker: {settings.CELERY_BROKER_URL}, Backend: {settings.CELERY_RESULT_BACKEND}")

celery_app = Celery(
    'worker',
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND
)

celery_app.conf.update(
    result_expires=3600,
    broker_connection_retry_on_startup=True,
    task_acks_late=True,
    worker_prefetch_multiplier=1,
)

# Autodiscover tasks em app/utils
celery_app.autodiscover_tasks(['app.utils'])
