import logging

from fastapi import APIRouter, HTTPException

from exceptions import BpiLabError
from models.sentinel_model import SentinelModel
from schemas.sentinel_schema import DetectionReport, DetectRequest

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/sentinel", tags=["sentinel"])


@router.post("/detect", response_model=DetectionReport)
def detect_attack(request: DetectRequest):
    try:
        return SentinelModel.detect(request.golden, request.runtime, request.xi)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("attack detection failed")
        raise HTTPException(status_code=500, detail="attack detection failed")
