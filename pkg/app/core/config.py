from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv
import os

load_dotenv()

CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "redis://localhost:6379/0")

class Settings(BaseSettings):
    APP_NAME: str = "ADMM 4D-Var API"
    OUTPUT_DIR: str = "runs"
    THREADS: int = 1
    LOG_LEVEL: str = "INFO"
    CELERY_BROKER_URL: str = CELERY_BROKER_URL
    CELERY_RESULT_BACKEND: str = CELERY_BROKER_URL

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

settings = Settings()
