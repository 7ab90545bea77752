import logging

from fastapi import APIRouter, HTTPException

from exceptions import BpiLabError
from models.floorplan_model import FloorplanModel
from models.simkit_model import SimkitModel
from schemas.simkit_schema import AttackRequest, PowerRequest, SimulateRequest
from schemas.trace_schema import PowerTrace, ThermalTrace

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/simkit", tags=["simkit"])


@router.post("/power", response_model=PowerTrace)
def generate_power(request: PowerRequest):
    try:
        return SimkitModel.gen_power(FloorplanModel.get(request.floorplan), request.workload)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("power generation failed")
        raise HTTPException(status_code=500, detail="power generation failed")


@router.post("/simulate", response_model=ThermalTrace)
def simulate(request: SimulateRequest):
    try:
        return SimkitModel.forward_sim(request.model, request.power, request.t0, request.ambient)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("simulation failed")
        raise HTTPException(status_code=500, detail="simulation failed")


@router.post("/attack", response_model=ThermalTrace)
def inject_attack(request: AttackRequest):
    try:
        return SimkitModel.inject_attack(request.trace, request.scenario)
    except BpiLabError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception:
        logger.exception("attack injection failed")
        raise HTTPException(status_code=500, detail="attack injection failed")
