import logging

from fastapi import APIRouter, HTTPException

from exceptions import BpiLabError
from models.cluster_model import ClusterModel
from schemas.cluster_schema import HotspotResult
from schemas.trace_schema import SteadyStateDataset

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/cluster", tags=["cluster"])


@router.post("/hotspots", response_model=HotspotResult)
def hotspots(dataset: SteadyStateDataset):
    try:
        return ClusterModel.hotspot_centroids(dataset, dataset.n)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("hotspot clustering failed")
        raise HTTPException(status_code=500, detail="hotspot clustering failed")
