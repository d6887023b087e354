import multiprocessing as mp
import os
from logging import getLogger
from typing import Any, Callable, List, Sequence

from ...logging_utils import setup_logging
from ..base import Launcher
from .config import ProcessConfig

LOGGER = getLogger("process")


class ProcessLauncher(Launcher[ProcessConfig]):
    NAME = "process"

    def __init__(self, config: ProcessConfig):
        super().__init__(config)

    def map(self, worker: Callable, items: Sequence[Any], *worker_args) -> List[Any]:
        if len(items) <= 1 or self.config.jobs == 1:
            return [worker(item, *worker_args) for item in items]

        ctx = mp.get_context(self.config.start_method)
        log_level = ctx.get_logger().getEffectiveLevel()
        processes = min(self.config.jobs, len(items))

        LOGGER.info(f"\t+ Mapping {len(items)} items over {processes} {self.config.start_method} workers")
        with ctx.Pool(processes=processes, initializer=initializer, initargs=(log_level,)) as pool:
            # starmap preserves the order of the items
            results = pool.starmap(worker, [(item, *worker_args) for item in items])

        return results


def initializer(log_level):
    os.environ["FRACTAL_SPECTRA_WORKER_PID"] = str(os.getpid())
    setup_logging(level=log_level, prefix="WORKER")
