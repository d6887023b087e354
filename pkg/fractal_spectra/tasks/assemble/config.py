from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional

from ...errors import UsageError
from ..config import TaskConfig

LOGGER = getLogger("assemble")


@dataclass
class AssembleConfig(TaskConfig):
    name: str = "assemble"
    _target_: str = "fractal_spectra.tasks.assemble.task.AssembleTask"

    level: int = 0
    # defaults to the all-ones word
    word: Optional[Any] = None
    # (row, col, value) triplets of A_<level>
    out: str = "matrix.csv"
    # (index, mass, btilde) of b_<level>
    masses: str = "masses.csv"

    def __post_init__(self):
        super().__post_init__()

        if self.level < 0:
            raise UsageError(f"level must be non-negative, got {self.level}")
