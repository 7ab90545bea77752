import logging
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# _level_names_mapping() is Python 3.11+; same mapping on 3.10.
_level_names_mapping = getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))


class Settings:
    def __init__(self):
        self.out_dir = Path(os.getenv("BPILAB_OUT", "bpilab_out"))
        self.log_level = os.getenv("BPILAB_LOG_LEVEL", "INFO").upper()
        self.ambient = float(os.getenv("BPILAB_AMBIENT", "298.15"))
        self.dt = float(os.getenv("BPILAB_DT", "0.1"))
        self.host = os.getenv("BPILAB_HOST", "127.0.0.1")
        self.port = int(os.getenv("BPILAB_PORT", "8000"))

        self._check_environment_variables()

    def _check_environment_variables(self):
        """Rejects settings the simulator cannot work with."""
        problems = []
        if self.ambient <= 0:
            problems.append(f"BPILAB_AMBIENT must be positive kelvin, got {self.ambient}")
        if self.dt <= 0:
            problems.append(f"BPILAB_DT must be positive seconds, got {self.dt}")
        if self.log_level not in _level_names_mapping():
            problems.append(f"BPILAB_LOG_LEVEL '{self.log_level}' is not a logging level")
            self.log_level = "INFO"
        if problems:
            for problem in problems:
                logger.warning(problem)
        else:
            logger.debug("settings loaded: out=%s ambient=%s dt=%s", self.out_dir, self.ambient, self.dt)

    def summary(self) -> dict:
        return {
            "out_dir": str(self.out_dir),
            "log_level": self.log_level,
            "ambient": self.ambient,
            "dt": self.dt,
        }


def configure_logging(level: str | None = None):
    logging.basicConfig(level=(level or settings.log_level).upper(), format=LOG_FORMAT, force=True)


settings = Settings()
