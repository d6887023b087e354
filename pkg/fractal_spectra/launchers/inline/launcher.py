from logging import getLogger
from typing import Any, Callable, List, Sequence

from ..base import Launcher
from .config import InlineConfig

LOGGER = getLogger("inline")


class InlineLauncher(Launcher[InlineConfig]):
    NAME = "inline"

    def __init__(self, config: InlineConfig):
        super().__init__(config)

    def map(self, worker: Callable, items: Sequence[Any], *worker_args) -> List[Any]:
        LOGGER.debug(f"\t+ Running {len(items)} items in the main process")
        return [worker(item, *worker_args) for item in items]
