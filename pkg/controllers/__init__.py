from .cluster_controller import router as cluster_router
from .identify_controller import router as identify_router
from .models_controller import router as models_router
from .sentinel_controller import router as sentinel_router
from .simkit_controller import router as simkit_router

__all__ = [
    'models_router',
    'simkit_router',
    'cluster_router',
    'identify_router',
    'sentinel_router',
]
