from dataclasses import dataclass
from logging import getLogger

from ..config import TaskConfig

LOGGER = getLogger("validate")


@dataclass
class ValidateConfig(TaskConfig):
    name: str = "validate"
    _target_: str = "fractal_spectra.tasks.validate.task.ValidateTask"
