from abc import ABC
from logging import getLogger
from typing import Any, Callable, ClassVar, Generic, List, Sequence

from .config import LauncherConfigT

LOGGER = getLogger("launcher")


class Launcher(Generic[LauncherConfigT], ABC):
    NAME: ClassVar[str]

    config: LauncherConfigT

    def __init__(self, config: LauncherConfigT):
        LOGGER.info(f"Allocating {self.NAME} launcher")
        self.config = config

    def map(self, worker: Callable, items: Sequence[Any], *worker_args) -> List[Any]:
        """Returns [worker(item, *worker_args) for item in items], in the order of `items`."""
        raise NotImplementedError("Launcher must implement map method")
