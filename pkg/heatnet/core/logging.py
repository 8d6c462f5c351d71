import logging
import sys
from typing import Optional

from heatnet.core.config import settings

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging(level: Optional[str] = None, verbose: bool = False) -> None:
    """
    Install a single stream handler on the ``heatnet`` logger.

    Args:
        level: Log level name; defaults to ``settings.LOG_LEVEL``
        verbose: Stream solver iteration lines (DEBUG on ``heatnet.solver``)
    """
    root = logging.getLogger("heatnet")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
    root.addHandler(handler)
    root.setLevel((level or settings.LOG_LEVEL).upper())
    root.propagate = False

    solver_logger = logging.getLogger("heatnet.solver")
    solver_logger.setLevel(logging.DEBUG if verbose else logging.NOTSET)
