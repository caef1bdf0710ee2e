"""Entry point for running surface_laplacian from the command line."""

import logging
import sys
from typing import Optional, Sequence

from surface_laplacian.cli import LOG_FORMAT, main
from surface_laplacian.config import settings

# Настройка логирования
logging.basicConfig(level=settings.log_level, format=LOG_FORMAT)

logger = logging.getLogger(__name__)


def run(argv: Optional[Sequence[str]] = None) -> int:
    logger.debug(f"Settings: crsf_max_edges={settings.crsf_max_edges}, parallel_workers={settings.parallel_workers}")
    return main(argv)


if __name__ == "__main__":
    sys.exit(run())
