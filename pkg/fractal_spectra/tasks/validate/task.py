from logging import getLogger

from ...structure import SelfSimilarStructure, ValidationReport, validate_structure
from ..base import Task, TaskContext
from .config import ValidateConfig

LOGGER = getLogger("validate")


class ValidateTask(Task[ValidateConfig]):
    NAME = "validate"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        LOGGER.info(f"\t+ Validating {structure.name or 'structure'}")
        self.report = validate_structure(structure, tolerance=context.tolerances.hypothesis)

    def get_report(self) -> ValidationReport:
        return self.report
