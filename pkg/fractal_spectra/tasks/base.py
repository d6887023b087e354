from abc import ABC
from dataclasses import dataclass
from logging import getLogger
from typing import Any, ClassVar, Generic, List, Optional

from ..artifact_utils import ArtifactMixin, save_gnuplot_script, save_table
from ..config import CapsConfig, ToleranceConfig, parse_letters
from ..lattice import BlowupWord
from ..launchers.base import Launcher
from ..spectra import PointMeasure
from ..structure import SelfSimilarStructure
from .config import TaskConfigT

LOGGER = getLogger("task")

MEASURE_COLUMNS = ["lambda", "weight", "kind"]


@dataclass
class TaskContext:
    tolerances: ToleranceConfig
    caps: CapsConfig
    launcher: Launcher


class Task(Generic[TaskConfigT], ABC):
    NAME: ClassVar[str]

    def __init__(self, config: TaskConfigT) -> None:
        LOGGER.info(f"Allocating {self.NAME} task")
        self.config = config
        self.artifacts: List[str] = []

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        raise NotImplementedError("Task must implement run method")

    def get_report(self) -> ArtifactMixin:
        raise NotImplementedError("Task must implement report method")

    def save_measures(
        self, rows: List[dict], path: Optional[str], gnuplot: bool = False, columns: List[str] = MEASURE_COLUMNS
    ) -> None:
        if path is None:
            return

        save_table(rows, columns, path)
        self.artifacts.append(path)

        if gnuplot:
            x, y = columns.index("lambda") + 1, columns.index("weight") + 1
            by = "level" if "level" in columns else None
            self.artifacts.append(save_gnuplot_script(path, x, y, by=by))


def measure_rows(measure: PointMeasure, kind: str, level: Optional[int] = None) -> List[dict]:
    """CSV rows of a measure, with locations within the clustering tolerance of 0 written as 0."""
    rows = []
    for record in measure.to_records(kind):
        if abs(record["lambda"]) <= measure.cluster_tol:
            record["lambda"] = 0.0
        rows.append(record if level is None else {"level": level, **record})
    return rows


def resolve_word(word: Optional[Any]) -> Optional[BlowupWord]:
    return None if word is None else BlowupWord(parse_letters(word))
