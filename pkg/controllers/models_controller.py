import logging
from typing import List

from fastapi import APIRouter, HTTPException

from exceptions import BpiLabError
from models.floorplan_model import FloorplanModel
from models.simkit_model import SimkitModel
from models.validation_model import ValidationModel
from schemas.system_schema import Floorplan, GenerateModelRequest, SystemModel, Violation

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/models", tags=["models"])


@router.get("/floorplans", response_model=List[Floorplan])
async def list_floorplans():
    return list(FloorplanModel.catalog().values())


@router.post("/generate", response_model=SystemModel)
def generate_model(request: GenerateModelRequest):
    try:
        fp = FloorplanModel.get(request.floorplan)
        return SimkitModel.synth_model(fp, request.seed)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("model generation failed")
        raise HTTPException(status_code=500, detail="model generation failed")


@router.post("/validate", response_model=List[Violation])
def validate_model(model: SystemModel, require_stable: bool = True):
    try:
        return ValidationModel.validate_model(model, require_stable=require_stable)
    except Exception:
        logger.exception("model validation failed")
        raise HTTPException(status_code=500, detail="model validation failed")
