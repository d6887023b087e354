from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional

from ...errors import UsageError
from ...spectra import MASSES
from ..config import TaskConfig

LOGGER = getLogger("spectrum")

BOUNDARY_CONDITIONS = ["neumann", "dirichlet"]


@dataclass
class SpectrumConfig(TaskConfig):
    name: str = "spectrum"
    _target_: str = "fractal_spectra.tasks.spectrum.task.SpectrumTask"

    level: int = 1
    word: Optional[Any] = None
    bc: str = "neumann"
    # b_n, or the unscaled btilde_n (b_n = omega_scale * btilde_n)
    mass: str = "b_n"
    # counting measure of the eigenvalues (weight = multiplicity)
    csv: Optional[str] = "spectrum.csv"
    gnuplot: bool = False

    def __post_init__(self):
        super().__post_init__()

        if self.level < 0:
            raise UsageError(f"level must be non-negative, got {self.level}")

        if self.bc not in BOUNDARY_CONDITIONS:
            raise UsageError(f"bc must be one of {BOUNDARY_CONDITIONS}, got {self.bc}")

        if self.mass not in MASSES:
            raise UsageError(f"mass must be one of {MASSES}, got {self.mass}")

        if self.gnuplot and self.csv is None:
            raise UsageError("gnuplot requires a csv output")
