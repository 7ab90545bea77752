import logging

from fastapi import APIRouter, HTTPException

from exceptions import BpiLabError
from models.identify_model import IdentifyModel
from schemas.identify_schema import EstimateRequest, FitRequest, OfflineResult, PowerEstimate

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/identify", tags=["identify"])


@router.post("/fit", response_model=OfflineResult)
def fit_model(request: FitRequest):
    try:
        return IdentifyModel.fit_offline(request.cooling, request.dataset, request.strategy, request.nmf)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("offline fit failed")
        raise HTTPException(status_code=500, detail="offline fit failed")


@router.post("/estimate", response_model=PowerEstimate)
def estimate_power(request: EstimateRequest):
    try:
        return IdentifyModel.estimate_power(request.model, request.trace, request.totals)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("power estimation failed")
        raise HTTPException(status_code=500, detail="power estimation failed")
