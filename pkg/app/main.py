from fastapi import FastAPI

from app.core.config import settings
from app.routers import experiments


app = FastAPI(title=settings.APP_NAME, version="0.1.0")

app.include_router(experiments.router)

@app.get("/")
def read_root():
    return {"health": "ok"}
