import logging
import time

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

logger = logging.getLogger(__name__)


class LoggingMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        # status and docs pages are not worth a log line
        quiet_paths = ["/", "/docs", "/openapi.json", "/status/config"]
        start_time = time.perf_counter()
        status = 500
        try:
            response = await call_next(request)
            status = response.status_code
            return response
        finally:
            if request.url.path not in quiet_paths:
                process_time = time.perf_counter() - start_time
                logger.info("%s %s -> %d (%.3fs)", request.method, request.url.path, status, process_time)
