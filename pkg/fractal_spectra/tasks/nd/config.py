from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional

from ...errors import UsageError
from ..config import TaskConfig

LOGGER = getLogger("nd")


@dataclass
class NDConfig(TaskConfig):
    name: str = "nd"
    _target_: str = "fractal_spectra.tasks.nd.task.NDTask"

    level: int = 1
    word: Optional[Any] = None
    # Neumann-Dirichlet eigenvalues weighted by multiplicity
    csv: Optional[str] = "nd.csv"
    gnuplot: bool = False

    def __post_init__(self):
        super().__post_init__()

        if self.level < 1:
            raise UsageError(f"Neumann-Dirichlet eigenfunctions require level >= 1, got {self.level}")

        if self.gnuplot and self.csv is None:
            raise UsageError("gnuplot requires a csv output")
