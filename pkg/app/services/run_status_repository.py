import json
import logging
from typing import Dict, Optional

import redis

from app.core.config import settings

logger = logging.getLogger(__name__)


class RunStatusRepository:
    """
    Estado das execuções em segundo plano, guardado no Redis em `run:{run_id}`.
    """

    def __init__(self, url: Optional[str] = None, client: Optional[redis.Redis] = None):
        self.url = url or settings.CELERY_RESULT_BACKEND
        self.redis = client

    def init_redis(self) -> Optional[redis.Redis]:
        if not self.redis:
            self.redis = redis.Redis.from_url(self.url, encoding="utf-8", decode_responses=True)
            try:
                self.redis.ping()
            except redis.ConnectionError as e:
                logger.error(f"Erro ao conectar ao Redis: {e}")
                self.redis = None
        return self.redis

    def get_status(self, run_id: str) -> Optional[Dict]:
        if not self.init_redis():
            return None
        state = self.redis.get(self._generate_key(run_id))
        return json.loads(state) if state else None

    def set_status(self, run_id: str, state: Dict, expire_seconds: int = 86400):
        if not self.init_redis():
            logger.error(f"Redis não está conectado. Não foi possível gravar o estado da execução {run_id}.")
            return
        self.redis.set(self._generate_key(run_id), json.dumps(state), ex=expire_seconds)

    def delete_status(self, run_id: str):
        if not self.init_redis():
            return
        self.redis.delete(self._generate_key(run_id))

    @staticmethod
    def _generate_key(run_id: str) -> str:
        return f"run:{run_id}"
