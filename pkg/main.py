import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from config import configure_logging, settings
from controllers import (
    cluster_controller,
    identify_controller,
    models_controller,
    sentinel_controller,
    simkit_controller,
)
from middleware.logging_middleware import LoggingMiddleware

logger = logging.getLogger(__name__)

app = FastAPI(
    title="BPI Lab API",
    description="Blind power identification, thermal model fitting and thermal sensor attack detection",
    version="1.0.0",
)

# CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.add_middleware(LoggingMiddleware)


@app.get("/")
async def root():
    return {"message": "BPI Lab API", "status": "active", "version": "1.0.0"}


app.include_router(models_controller.router)
app.include_router(simkit_controller.router)
app.include_router(cluster_controller.router)
app.include_router(identify_controller.router)
app.include_router(sentinel_controller.router)


@app.get("/status/config")
async def config_status():
    return settings.summary()


if __name__ == "__main__":
    import uvicorn

    configure_logging()
    uvicorn.run(app, host=settings.host, port=settings.port)
