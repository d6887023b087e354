from dataclasses import dataclass
from logging import getLogger
from typing import Any, List, Optional

from ...errors import UsageError
from ..config import TaskConfig
from ..spectrum.config import BOUNDARY_CONDITIONS

LOGGER = getLogger("dos")


@dataclass
class DosConfig(TaskConfig):
    name: str = "dos"
    _target_: str = "fractal_spectra.tasks.dos.task.DosTask"

    # "1..5", "1,2,4", [1, 2, 4] or 3
    levels: Any = "1..3"
    bc: str = "neumann"
    # neumann/dirichlet densities of states, or the Neumann-Dirichlet density
    nd: bool = False
    csv: Optional[str] = "dos.csv"
    gnuplot: bool = False

    def __post_init__(self):
        super().__post_init__()

        self.levels = parse_levels(self.levels)

        if self.bc not in BOUNDARY_CONDITIONS:
            raise UsageError(f"bc must be one of {BOUNDARY_CONDITIONS}, got {self.bc}")

        if self.gnuplot and self.csv is None:
            raise UsageError("gnuplot requires a csv output")


def parse_levels(levels: Any) -> List[int]:
    try:
        if isinstance(levels, int):
            parsed = [levels]
        elif isinstance(levels, str) and ".." in levels:
            first, last = levels.split("..")
            parsed = list(range(int(first), int(last) + 1))
        elif isinstance(levels, str):
            parsed = [int(level) for level in levels.split(",") if level.strip() != ""]
        else:
            parsed = [int(level) for level in levels]
    except (TypeError, ValueError):
        raise UsageError(f"Could not parse levels {levels!r}, expected e.g. '1..5' or '1,2,3'")

    if not parsed:
        raise UsageError(f"No level in {levels!r}")
    if min(parsed) < 0:
        raise UsageError(f"Levels must be non-negative, got {parsed}")

    return sorted(set(parsed))
