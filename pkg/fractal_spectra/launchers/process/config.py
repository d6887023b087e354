from dataclasses import dataclass
from logging import getLogger
from typing import Optional

from ...errors import UsageError
from ...system_utils import get_cpu_count
from ..config import LauncherConfig

LOGGER = getLogger("process")


@dataclass
class ProcessConfig(LauncherConfig):
    name: str = "process"
    _target_: str = "fractal_spectra.launchers.process.launcher.ProcessLauncher"

    start_method: str = "spawn"
    # defaults to the number of logical cpus
    jobs: Optional[int] = None

    def __post_init__(self):
        super().__post_init__()

        if self.start_method not in ["spawn", "fork"]:
            raise UsageError(f"start_method must be one of ['spawn', 'fork'], got {self.start_method}")

        if self.jobs is None:
            self.jobs = get_cpu_count()
        elif self.jobs <= 0:
            raise UsageError(f"jobs must be a positive integer, got {self.jobs}")
